"""Acceptance criteria 1-10, each printing a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (lines are printed even
under output capture).
"""
import math

import numpy as np
import pytest
from scipy import integrate

from coulomb_bound.bounds import (C1, C2, C3, C_DIRAC, constants_from_mu, lambda_star,
                                  optimize_alpha, theorem_bound)
from coulomb_bound.densities import Exponential, dilate, make_exponential, scale_tf
from coulomb_bound.functionals import (direct_energy, k_double, k_fourier, l43, q_ratio,
                                       radial_potential)
from coulomb_bound.mu_model import Uniform, m1, m2, self_energy
from coulomb_bound.oracle import (FixedRadius, LambdaRecipe, MCConfig, ProductState,
                                  check_lemma2, check_theorem, onsager_margin, random_config)


@pytest.fixture
def criterion(report):
    def check(number, name, ok, detail):
        report(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {name}: {detail}")
        assert ok, detail
    return check


def _fit(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def test_criterion_01_constants(criterion):
    want = {"C1": (C1, 1.4508), "C2": (C2, 0.2382), "C3": (C3, 1.1781), "c_D": (C_DIRAC, 0.7386)}
    ok = all(round(v, 4) == p for v, p in want.values()) and C3 == 3 * math.pi / 8
    detail = ", ".join(f"{k}={v:.6f}" for k, (v, _) in want.items())
    criterion(1, "theorem constants", ok, detail)


def test_criterion_02_uniform_ball_moments(criterion):
    mu = Uniform()
    got = {"D": (self_energy(mu), 0.6), "M1": (m1(mu), 2 * math.pi / 5),
           "M2^2": (m2(mu) ** 2, 23 * math.pi / 2310)}
    rel = {k: abs(v / t - 1) for k, (v, t) in got.items()}
    criterion(2, "uniform-ball moments", all(r <= 1e-8 for r in rel.values()),
              ", ".join(f"{k} rel err {r:.1e}" for k, r in rel.items()))


def _momentum_oracle(a, b):
    c = b / 2
    w = lambda p: p * p / (p * p + c * c) ** 4
    mean = (integrate.quad(lambda p: p * w(p), 0, np.inf, epsabs=0, epsrel=1e-13)[0]
            / integrate.quad(w, 0, np.inf, epsabs=0, epsrel=1e-13)[0])
    return (8 * math.pi * a / b ** 3) * mean


def test_criterion_03_exponential_functionals(criterion):
    a, b = 1.7, 0.9
    rho = Exponential(a, b)
    L_ref = 27 * a ** (4 / 3) * math.pi / (8 * b ** 3)
    L_err = abs(l43(rho, exact=False) / L_ref - 1)
    kf, kd = k_fourier(rho), k_double(rho)
    route = abs(kd - kf) / kf
    oracle = _momentum_oracle(a, b)
    orc = abs(kf / oracle - 1)
    stated = 8 * a / (3 * b * b)
    # adjudication: the independent routes reproduce 32a/(3b^2), four times the stated value
    adjudicated = abs(oracle / stated - 4.0) < 1e-10 and abs(kf / stated - 4.0) < 1e-6
    ok = L_err <= 1e-8 and route <= 1e-4 and orc <= 1e-6 and adjudicated
    criterion(3, "exponential density", ok,
              f"L rel err {L_err:.1e}, routes {route:.1e}, oracle {orc:.1e}, "
              f"K'={kf:.8f} = 32a/(3b^2); 8a/(3b^2)={stated:.6f} rejected (ratio {kf / stated:.6f})")


def test_criterion_04_appendix_laws(criterion):
    Ns = [10.0 ** k for k in range(1, 7)]
    q = [q_ratio(make_exponential(N, 1.0)) for N in Ns]
    sN = _fit(Ns, q)
    base = Exponential(1.0, 1.0)
    Zs = np.arange(1, 51, dtype=float)
    L = [l43(scale_tf(base, Z)) for Z in Zs]
    K = [k_fourier(scale_tf(base, Z)) for Z in Zs]
    sL, sK, sQ = _fit(Zs, L), _fit(Zs, K), _fit(Zs, np.array(K) / np.array(L))
    ok = (abs(sN + 1 / 3) < 1e-3 and abs(sL - 5 / 3) < 1e-3 and abs(sK - 4 / 3) < 1e-3
          and abs(sQ + 1 / 3) < 1e-3)
    criterion(4, "appendix scaling laws", ok,
              f"Q~N^{sN:.6f}; TF: L~Z^{sL:.6f}, K'~Z^{sK:.6f}, Q~Z^{sQ:.6f}")


def test_criterion_05_dilation(criterion):
    rho = make_exponential(10.0, 1.0)
    L0, K0, Q0 = l43(rho), k_fourier(rho), q_ratio(rho)
    worst = 0.0
    for s in (0.5, 2.0, 5.0):
        d = dilate(rho, s)
        worst = max(worst, abs(q_ratio(d) / Q0 - 1), abs(l43(d) / (s * L0) - 1),
                    abs(k_fourier(d) / (s * K0) - 1))
    criterion(5, "dilation invariance", worst <= 1e-6, f"worst rel deviation {worst:.1e}")


def test_criterion_06_theorem_on_product_states(criterion):
    orbitals = {c: ProductState.exponential(c, 1).orbital for c in (0.5, 1.0, 2.0)}
    J_err = max(abs(2 * direct_energy(o, o) / (5 * c / 8) - 1) for c, o in orbitals.items())
    margins = []
    for make in (ProductState.exponential, ProductState.gaussian):
        for N in (2, 5, 10):
            for e in (0.5, 1.0, 2.0):
                chk = check_theorem(make(1.0, N), e)
                assert chk.E == pytest.approx(-0.5 * N * e * e * chk.J, rel=1e-14)
                margins += [chk.margin_theorem, chk.margin_lieb_oxford]
    ok = J_err <= 1e-8 and min(margins) > 0
    criterion(6, "theorem on product states", ok,
              f"J=5c/8 rel err {J_err:.1e}; 18 cases, min margin {min(margins):.4f}")


def test_criterion_07_onsager_suite(criterion):
    mu = Uniform()
    cache = {}
    results = {"lambda": [], "fixed": []}
    for seed in range(100):
        N = 2 + seed % 19
        if N not in cache:
            rho = make_exponential(float(N), 1.0)
            cache[N] = (rho, radial_potential(rho), direct_energy(rho, rho, with_error=True))
        rho, V, D = cache[N]
        cfg = random_config(N, seed, 3.0)
        for key, sm in (("lambda", LambdaRecipe(1.0)), ("fixed", FixedRadius(0.5))):
            results[key].append(onsager_margin(cfg, rho, mu, sm, potential=V, D_rho=D))
    ok = True
    parts = []
    for key, reps in results.items():
        holds = all(r.holds for r in reps)
        strict = sum(r.margin > 0 for r in reps)
        ok = ok and holds and strict >= 99
        parts.append(f"{key}: {strict}/100 strictly positive, min {min(r.margin for r in reps):.3g}")
    criterion(7, "Onsager suite", ok, "; ".join(parts))


def test_criterion_08_lemma2_mc(criterion):
    rho = Exponential(1.0, 1.0)
    checks = {lam: check_lemma2(rho, lam, Uniform(), MCConfig(samples=400_000, seed=2024))
              for lam in (1.0, 4.0, 16.0)}
    big = checks[16.0]
    ratio_ok = abs(big.ratio_to_leading - 1) <= 3 * big.F_std_error / big.leading + 0.2
    ok = all(c.holds for c in checks.values()) and ratio_ok
    criterion(8, "smearing-error inequality (MC)", ok,
              ", ".join(f"lam={lam:g} F={c.F:.4g}+-{c.F_std_error:.1g} RHS={c.rhs:.4g}"
                        for lam, c in checks.items())
              + f"; F/(M1 L/lam^2) at 16 = {big.ratio_to_leading:.4f}")


def test_criterion_09_optimizer_dominance(criterion):
    rng = np.random.default_rng(99)
    grid = np.linspace(1e-3, 1 - 1e-3, 1000)
    worst = math.inf
    for _ in range(10):
        L, K = 10 ** rng.uniform(-2, 2, 2)
        _, best = optimize_alpha(L, K, 1.0)
        tops = max(theorem_bound(L, K, 1.0, a).total for a in grid)
        worst = min(worst, (best.total - tops) / abs(tops))
    criterion(9, "optimizer dominance", worst >= -1e-12, f"min (opt - grid max)/|grid max| = {worst:.2e}")


def test_criterion_10_lambda_optimization(criterion):
    mc = Uniform().constants
    worst_scan, worst_coef = 0.0, 0.0
    for alpha in (0.1, 0.5, 0.9):
        lam = lambda_star(mc, alpha)
        grid = np.geomspace(0.1 * lam, 10 * lam, 200_001)
        first = mc.M1 / ((1 - alpha) * grid ** 2) + grid * mc.D_mu
        i = int(np.argmin(first))
        step = grid[min(i + 1, len(grid) - 1)] - grid[max(i - 1, 0)]
        worst_scan = max(worst_scan, abs(grid[i] - lam) / step)
        k1, k2, k3 = constants_from_mu(mc, alpha).k_convention
        got = (mc.M1 / ((1 - alpha) * lam ** 2) + lam * mc.D_mu,
               mc.M2 / ((1 - alpha) * lam ** 2.5),
               1 / (4 * (1 - alpha) * alpha * lam ** 3))
        closed = (0.9 * (4 * math.pi / (3 * (1 - alpha))) ** (1 / 3),
                  (3 / (4 * math.pi)) ** (5 / 6) * math.sqrt(23 * math.pi / 2310)
                  * (1 - alpha) ** (-1 / 6),
                  3 / (16 * math.pi * alpha))
        for g, k, c in zip(got, (k1, k2, k3), closed):
            worst_coef = max(worst_coef, abs(g / k - 1), abs(g / c - 1))
    ok = worst_scan <= 1.0 and worst_coef <= 1e-12
    criterion(10, "lambda optimization", ok,
              f"scan offset {worst_scan:.2f} grid steps, coefficient rel err {worst_coef:.1e}")
