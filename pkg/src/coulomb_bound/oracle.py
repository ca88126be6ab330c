"""Brute-force checks on explicit systems.

* point configurations: the exact Coulomb sum and the smeared-charge
  (Onsager) lower bound on it;
* product states ``psi = prod_i phi(x_i)``, whose indirect energy reduces to
  ``E = -(N/2) e^2 J`` with ``J = int int |phi|^2 |phi|^2 / |x - y|``;
* a seeded Monte Carlo estimate of the smearing-error integral ``F`` and the
  inequality that bounds it.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import LIEB_OXFORD, lieb_oxford_bound, optimize_alpha
from .densities import Exponential, Gaussian, RadialDensity, Scaled, total_charge
from .exceptions import DomainError
from .functionals import direct_energy, k_fourier, l43, radial_potential
from .mu_model import TrialMu, remainder_R
from .quadrature import adaptive_gauss_legendre, panel_nodes, refine_edges

__all__ = [
    "PointConfig", "FixedRadius", "LambdaRecipe", "OnsagerReport", "ProductState",
    "TheoremCheck", "MCConfig", "MCEstimate", "Lemma2Check", "coulomb_sum",
    "onsager_margin", "random_config", "indirect_energy_product", "check_theorem",
    "mc_F", "check_lemma2",
]

FOUR_PI = 4.0 * math.pi
TWO_PI_SQ = 2.0 * math.pi ** 2


@dataclass(frozen=True, eq=False)
class PointConfig:
    positions: np.ndarray
    e: float = 1.0

    def __post_init__(self):
        x = np.array(self.positions, dtype=float)
        if x.ndim != 2 or x.shape[1] != 3 or len(x) < 2:
            raise DomainError("need at least two 3-vectors")
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)
        if self.min_distance() <= 0:
            raise DomainError("coincident points")

    def _distances(self):
        x = self.positions
        iu = np.triu_indices(len(x), 1)
        return np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)[iu]

    def min_distance(self) -> float:
        return float(self._distances().min())

    @property
    def N(self) -> int:
        return len(self.positions)


def coulomb_sum(cfg: PointConfig) -> float:
    """``e^2 sum_{i<j} 1 / |x_i - x_j|``."""
    return cfg.e ** 2 * float(np.sum(1.0 / cfg._distances()))


def random_config(N: int, seed: int, radius: float = 3.0) -> PointConfig:
    """``N`` points uniform in a ball of the given radius."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(N, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    r = radius * rng.random(N) ** (1.0 / 3.0)
    return PointConfig(d * r[:, None])


@dataclass(frozen=True)
class FixedRadius:
    """Every point smeared over a ball of radius ``r0``."""
    r0: float


@dataclass(frozen=True)
class LambdaRecipe:
    """Radius ``1 / (lam rho(x_i)^(1/3))`` around each point."""
    lam: float


@dataclass
class OnsagerReport:
    lhs: float
    rhs: float
    margin: float
    budget: float
    D_rho: float
    cross: list = field(default_factory=list)
    self_terms: list = field(default_factory=list)
    radii: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.margin >= -self.budget

    def to_dict(self):
        d = asdict(self)
        d["holds"] = self.holds
        return d


def _smearing_radii(cfg, rho, smearing):
    if isinstance(smearing, FixedRadius):
        if not smearing.r0 > 0:
            raise DomainError("smearing radius must be positive")
        return np.full(cfg.N, float(smearing.r0))
    if isinstance(smearing, LambdaRecipe):
        if not smearing.lam > 0:
            raise DomainError("lambda must be positive")
        dens = rho(np.linalg.norm(cfg.positions, axis=1))
        bad = np.nonzero(~(dens > 0))[0]
        if len(bad):
            i = int(bad[0])
            raise DomainError(f"rho vanishes at point {i} {cfg.positions[i].tolist()}; "
                              "the lambda recipe needs rho(x_i) > 0")
        return 1.0 / (smearing.lam * dens ** (1.0 / 3.0))
    raise DomainError(f"unknown smearing {smearing!r}")


def onsager_margin(cfg: PointConfig, rho: RadialDensity, mu: TrialMu, smearing,
                   *, potential: radial_potential | None = None,
                   D_rho: tuple[float, float] | None = None) -> OnsagerReport:
    """``sum 1/|x_i - x_j|  -  [-D(rho,rho) + 2 sum D(rho,mu_i) - sum D(mu_i,mu_i)]``.

    ``mu_i`` is ``mu`` centred at ``x_i`` and dilated to the smearing radius;
    ``D(rho, mu_i)`` integrates the sphere averages of the Newton potential of
    ``rho`` against the radial profile of ``mu``.  ``potential`` and ``D_rho``
    can be passed in to reuse work across configurations.
    """
    if cfg.e != 1.0:
        raise DomainError("Onsager margin is defined for unit charges")
    radii = _smearing_radii(cfg, rho, smearing)
    V = potential if potential is not None else radial_potential(rho)
    if D_rho is None:
        D_rho = direct_energy(rho, rho, with_error=True)
    Drr, Drr_err = D_rho
    D_mu = mu.constants.D_mu
    lhs = coulomb_sum(cfg)
    cross = []
    cross_err = 0.0
    for x, a in zip(cfg.positions, radii):
        d = float(np.linalg.norm(x))
        kinks = list(mu.breakpoints)
        if 0 < d / a < 1:
            kinks.append(d / a)
        val, err = adaptive_gauss_legendre(
            lambda tau: 0.5 * FOUR_PI * tau * tau * mu(tau) * V.sphere_average(d, a * tau),
            0.0, 1.0, breakpoints=kinks, rtol=1e-12)
        cross.append(val)
        cross_err += err
    selfs = [D_mu / a for a in radii]
    rhs = -Drr + 2.0 * sum(cross) - sum(selfs)
    scale = lhs + Drr + 2.0 * sum(cross) + sum(selfs)
    budget = Drr_err + 2.0 * cross_err + 1e-9 * scale
    return OnsagerReport(lhs=lhs, rhs=rhs, margin=lhs - rhs, budget=budget, D_rho=Drr,
                         cross=cross, self_terms=selfs, radii=radii.tolist())


@dataclass(frozen=True, eq=False)
class ProductState:
    """``N`` particles in the same normalized orbital; ``orbital`` is ``|phi|^2``."""

    orbital: RadialDensity
    N: int

    def __post_init__(self):
        if self.N < 0 or int(self.N) != self.N:
            raise DomainError("particle count must be a nonnegative integer")
        norm = total_charge(self.orbital, exact=False)
        if abs(norm - 1.0) > 1e-10:
            raise DomainError(f"orbital is not normalized (norm {norm!r})")

    @classmethod
    def exponential(cls, c: float, N: int) -> ProductState:
        """``phi = sqrt(c^3/pi) exp(-c r)``."""
        return cls(Exponential(c ** 3 / math.pi, 2.0 * c), N)

    @classmethod
    def gaussian(cls, s: float, N: int) -> ProductState:
        """``phi`` proportional to ``exp(-r^2 / (2 s^2))``."""
        return cls(Gaussian(1.0 / (math.pi ** 1.5 * s ** 3), s), N)

    def density(self, e: float = 1.0) -> RadialDensity:
        """Charge density ``e N |phi|^2``."""
        if self.N == 0 or e == 0:
            raise DomainError("state carries no charge")
        return Scaled(self.orbital, 1.0, e * self.N)


def _self_coulomb(orbital: RadialDensity) -> tuple[float, float]:
    D, err = direct_energy(orbital, orbital, with_error=True)
    return 2.0 * D, 2.0 * err


def indirect_energy_product(state: ProductState, e: float = 1.0) -> float:
    """``<sum_{i<j} e^2/|x_i - x_j|> - D(rho, rho) = -(N/2) e^2 J`` for a product state."""
    if state.N == 0 or e == 0:
        return 0.0
    J, _ = _self_coulomb(state.orbital)
    return -0.5 * state.N * e * e * J


@dataclass
class TheoremCheck:
    N: int
    e: float
    E: float
    J: float
    L: float
    K_prime: float
    alpha_star: float
    bound: float
    terms: list
    lieb_oxford: float
    margin_theorem: float
    margin_lieb_oxford: float

    @property
    def holds(self) -> bool:
        return self.margin_theorem >= 0 and self.margin_lieb_oxford >= 0

    def to_dict(self):
        d = asdict(self)
        d["holds"] = self.holds
        return d


def check_theorem(state: ProductState, e: float = 1.0) -> TheoremCheck:
    """Compare the exact indirect energy of ``state`` with the lower bounds.

    ``rho = e N |phi|^2`` is the charge density, so ``L`` and ``K'`` carry
    the charge while ``e`` in the bound is the particle charge.
    """
    J, _ = _self_coulomb(state.orbital)
    if state.N == 0 or e == 0:
        return TheoremCheck(state.N, e, 0.0, J, 0.0, 0.0, 0.0, 0.0, [0.0, 0.0, 0.0], 0.0, 0.0, 0.0)
    E = -0.5 * state.N * e * e * J
    rho = state.density(e)
    L = l43(rho)
    K = k_fourier(rho)
    alpha, b = optimize_alpha(L, K, e)
    lo = lieb_oxford_bound(L, e, LIEB_OXFORD)
    return TheoremCheck(state.N, e, E, J, L, K, alpha, b.total, list(b.terms), lo,
                        E - b.total, E - lo)


@dataclass(frozen=True)
class MCConfig:
    samples: int = 200_000
    seed: int = 0
    threads: int = 1
    batch: int = 16_384

    def __post_init__(self):
        if self.samples < 2 or self.batch < 2 or self.threads < 1:
            raise DomainError("MC needs samples >= 2, batch >= 2, threads >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int

    def to_dict(self):
        return asdict(self)


class _RadialSampler:
    """Piecewise-uniform radial proposal matched to ``4 pi r^2 w(r)``."""

    def __init__(self, rho: RadialDensity, weight, cells_per_scale: int = 64):
        edges = refine_edges(rho.edges(), rho.length_scale / cells_per_scale)
        x, w = panel_nodes(edges, 8)
        mass = (w * FOUR_PI * x * x * weight(rho._eval(x))).reshape(len(edges) - 1, 8).sum(1)
        keep = mass > 0
        self.lo = edges[:-1][keep]
        self.width = np.diff(edges)[keep]
        self.p = mass[keep] / mass[keep].sum()
        self.cdf = np.cumsum(self.p)
        self.cdf[-1] = 1.0

    def sample(self, rng, n):
        k = np.searchsorted(self.cdf, rng.random(n), side="right")
        k = np.minimum(k, len(self.p) - 1)
        r = self.lo[k] + self.width[k] * rng.random(n)
        q = self.p[k] / self.width[k]  # radial proposal density in r
        return r, q


def _unit_vectors(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def _batch_F(rho, lam, mu, sampler, seed, index, n):
    rng = np.random.Generator(np.random.Philox(key=(seed << 64) | index))
    r, q = sampler.sample(rng, n)
    x = _unit_vectors(rng, n) * r[:, None]
    rx = rho._eval(r)
    a = 1.0 / (lam * np.cbrt(rx))
    t = np.cbrt(rng.random(n))
    t = np.maximum(t, 1e-300)
    y = x + (a * t)[:, None] * _unit_vectors(rng, n)
    ry = rho._eval(np.linalg.norm(y, axis=1))
    ball = FOUR_PI / 3.0 * a ** 3
    h = lam * rx ** (4.0 / 3.0) * ball * ry * remainder_R(mu, t)
    vals = h * FOUR_PI * r * r / q
    return float(np.sum(vals)), float(np.sum(vals * vals))


def mc_F(rho: RadialDensity, lam: float, mu: TrialMu, cfg: MCConfig = MCConfig()) -> MCEstimate:
    """Monte Carlo estimate of
    ``F = int int rho(y) lam rho(x)^(4/3) R(lam rho(x)^(1/3) |x - y|) dy dx``.

    ``x`` is drawn from (a piecewise-uniform fit to) ``rho^(4/3)``, ``y``
    uniformly from the ball around ``x`` where ``R`` is supported.  Batch
    ``j`` uses a Philox stream keyed by ``(seed, j)`` and batch sums are
    combined in index order, so the result depends only on ``seed``,
    ``samples`` and ``batch``.
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    sampler = _RadialSampler(rho, lambda v: v ** (4.0 / 3.0))
    sizes = [cfg.batch] * (cfg.samples // cfg.batch)
    if cfg.samples % cfg.batch:
        sizes.append(cfg.samples % cfg.batch)

    def run(j):
        return _batch_F(rho, lam, mu, sampler, cfg.seed, j, sizes[j])

    if cfg.threads == 1:
        parts = [run(j) for j in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    n = cfg.samples
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
    return MCEstimate(mean=mean, std_error=math.sqrt(var / n), samples=n, seed=cfg.seed)


@dataclass
class Lemma2Check:
    lam: float
    F: float
    F_std_error: float
    rhs: float
    slack: float
    leading: float
    ratio_to_leading: float
    L: float
    K: float
    holds: bool
    mc: dict

    def to_dict(self):
        return asdict(self)


def check_lemma2(rho: RadialDensity, lam: float, mu: TrialMu, cfg: MCConfig = MCConfig(),
                 *, L: float | None = None, K_prime: float | None = None) -> Lemma2Check:
    """``F <= M1 L / lam^2 + lam^(-3/2) K^(1/2) [F^(1/2) + M2 L^(1/2) / lam]``
    with ``K = 2 pi^2 K_prime``; holds if ``F_MC <= RHS + 3 sigma``."""
    est = mc_F(rho, lam, mu, cfg)
    L = l43(rho) if L is None else L
    K = TWO_PI_SQ * float(k_fourier(rho) if K_prime is None else K_prime)
    c = mu.constants
    F = est.mean
    leading = c.M1 * L / lam ** 2
    rhs = leading + lam ** -1.5 * math.sqrt(K) * (math.sqrt(max(F, 0.0)) + c.M2 * math.sqrt(L) / lam)
    return Lemma2Check(lam=lam, F=F, F_std_error=est.std_error, rhs=rhs, slack=rhs - F,
                       leading=leading, ratio_to_leading=F / leading, L=L, K=K,
                       holds=F <= rhs + 3.0 * est.std_error, mc=est.to_dict())
