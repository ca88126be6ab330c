"""Lower bounds on the indirect Coulomb energy from ``L`` and ``K_prime``.

The three-term bound reads, for ``0 < alpha < 1`` and particle charge ``e``::

    E >= - C1 (1-alpha)^(-1/3) e^(2/3) L
         - C2 (1-alpha)^(-1/6) e^(5/6) sqrt(K_prime L)
         - C3 / alpha * e * K_prime

with ``L = int rho^(4/3)`` and ``K_prime = (sqrt rho, |p| sqrt rho)``.  The
constants come from the uniform unit-ball smearing; :func:`constants_from_mu`
rederives them for any trial distribution.  Inside the derivation the
quantity ``K = 2 pi^2 K_prime`` is used ("K convention"); only
:func:`intermediate_bound` takes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .densities import SpeciesDensity
from .exceptions import DomainError
from .mu_model import MuConstants
from .quadrature import panel_integral

__all__ = [
    "C1", "C2", "C3", "C_DIRAC", "LIEB79", "LIEB_OXFORD", "CHAN_HANDY", "BEST_KNOWN_LOWER",
    "UNIFORM_MU", "TheoremConstants", "BoundBreakdown", "theorem_constants", "theorem_bound",
    "optimize_alpha", "golden_section", "constants_from_mu", "lambda_star",
    "intermediate_bound", "dirac_estimate", "lieb_oxford_bound", "lieb79_bound",
    "lieb_oxford_general", "comparisons",
]

TWO_PI_SQ = 2.0 * math.pi ** 2

# uniform unit ball: D(mu, mu), M1, M2
UNIFORM_MU = MuConstants(M1=2.0 * math.pi / 5.0, M2=math.sqrt(23.0 * math.pi / 2310.0),
                         D_mu=3.0 / 5.0, errors={"M1": 0.0, "M2": 0.0, "D_mu": 0.0})

C1 = 0.9 * (4.0 * math.pi / 3.0) ** (1.0 / 3.0)
C2 = (3.0 / (4.0 * math.pi)) ** (5.0 / 6.0) * math.sqrt(23.0 * math.pi / 2310.0) * math.sqrt(TWO_PI_SQ)
C3 = 3.0 * math.pi / 8.0
C_DIRAC = 0.75 * (3.0 / math.pi) ** (1.0 / 3.0)

LIEB79 = 8.52
LIEB_OXFORD = 1.68
CHAN_HANDY = 1.636
BEST_KNOWN_LOWER = 1.234


@dataclass(frozen=True)
class TheoremConstants:
    """Coefficients of the three terms.

    ``k_convention`` holds the coefficients multiplying ``L``,
    ``sqrt(K L)`` and ``K``; ``C1, C2, C3`` multiply ``L``,
    ``sqrt(K_prime L)`` and ``K_prime``.  When ``alpha`` is given, the
    ``(1-alpha)`` and ``alpha`` factors are included; otherwise they are not.
    """

    C1: float
    C2: float
    C3: float
    k_convention: tuple[float, float, float]
    alpha: float | None = None
    provenance: dict = field(default_factory=dict)


def theorem_constants() -> TheoremConstants:
    return TheoremConstants(
        C1=C1, C2=C2, C3=C3,
        k_convention=(C1, C2 / math.sqrt(TWO_PI_SQ), C3 / TWO_PI_SQ),
        provenance={
            "C1": "(9/10) (4 pi/3)^(1/3)",
            "C2": "(3/(4 pi))^(5/6) sqrt(23 pi/2310) sqrt(2 pi^2)",
            "C3": "3 pi / 8",
            "c_D": "(3/4) (3/pi)^(1/3)",
        },
    )


@dataclass(frozen=True)
class BoundBreakdown:
    alpha: float
    e: float
    term1: float
    term2: float
    term3: float
    L: float
    K_prime: float
    comparisons: dict
    alpha_flag: str = "interior"

    @property
    def total(self) -> float:
        return self.term1 + self.term2 + self.term3

    @property
    def terms(self) -> tuple[float, float, float]:
        return (self.term1, self.term2, self.term3)

    @property
    def first_term_share(self) -> float:
        t = self.total
        return self.term1 / t if t else 1.0

    def to_dict(self) -> dict:
        return {
            "alpha_star": self.alpha,
            "alpha_flag": self.alpha_flag,
            "terms": list(self.terms),
            "total": self.total,
            "first_term_share": self.first_term_share,
            "comparisons": dict(self.comparisons),
            "inputs": {"L": self.L, "K_prime": self.K_prime, "e": self.e},
        }


def _check_inputs(L, K_prime, e):
    if not (L >= 0 and math.isfinite(L)):
        raise DomainError("L must be finite and nonnegative")
    if not (K_prime >= 0 and math.isfinite(K_prime)):
        raise DomainError("K_prime must be finite and nonnegative")
    if not (e >= 0 and math.isfinite(e)):
        raise DomainError("charge e must be finite and nonnegative")


def comparisons(L: float, e: float = 1.0) -> dict:
    """Equal-charge reference values ``-C e^(2/3) L`` for the classical constants."""
    return {
        "dirac": dirac_estimate(L, e),
        "lieb79": -LIEB79 * e ** (2.0 / 3.0) * L,
        "lieb_oxford_168": lieb_oxford_bound(L, e, LIEB_OXFORD),
        "chan_handy_1636": lieb_oxford_bound(L, e, CHAN_HANDY),
        "best_known_lower_1234": lieb_oxford_bound(L, e, BEST_KNOWN_LOWER),
    }


def _terms(L, K_prime, e, alpha):
    t1 = -C1 * (1.0 - alpha) ** (-1.0 / 3.0) * e ** (2.0 / 3.0) * L
    t2 = -C2 * (1.0 - alpha) ** (-1.0 / 6.0) * e ** (5.0 / 6.0) * math.sqrt(K_prime * L)
    t3 = -C3 * e * K_prime / alpha if K_prime else 0.0
    return t1, t2, t3


def theorem_bound(L: float, K_prime: float, e: float = 1.0, alpha: float = 0.5) -> BoundBreakdown:
    """Evaluate the three-term lower bound at a fixed ``alpha`` in ``(0, 1)``."""
    _check_inputs(L, K_prime, e)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    t1, t2, t3 = _terms(L, K_prime, e, alpha)
    return BoundBreakdown(alpha, e, t1, t2, t3, L, K_prime, comparisons(L, e))


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, a: float, b: float, tol: float = 1e-12) -> float:
    """Minimizer of a unimodal ``f`` on ``(a, b)`` to within ``tol``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return c if fc < fd else d


def optimize_alpha(L: float, K_prime: float, e: float = 1.0) -> tuple[float, BoundBreakdown]:
    """Best ``alpha``: maximizes the (negative) bound.

    The magnitude ``A(1-a)^(-1/3) + B(1-a)^(-1/6) + C/a`` is strictly convex,
    so golden-section search finds the unique optimum.  With ``K_prime = 0``
    the optimum is the limit ``alpha -> 0``, reported as ``0`` with flag
    ``"limit"``.
    """
    _check_inputs(L, K_prime, e)
    if L <= 0:
        raise DomainError("optimize_alpha needs L > 0")
    if K_prime == 0 or e == 0:
        t1 = -C1 * e ** (2.0 / 3.0) * L
        return 0.0, BoundBreakdown(0.0, e, t1, 0.0, 0.0, L, K_prime, comparisons(L, e), "limit")

    def magnitude(a):
        return -sum(_terms(L, K_prime, e, a))

    # coarse log-spaced bracket first; the objective can vary over decades in alpha
    grid = np.concatenate((np.geomspace(1e-12, 0.5, 200), 1.0 - np.geomspace(0.5, 1e-12, 200)[1:]))
    vals = [magnitude(a) for a in grid]
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)] if i > 0 else 0.0
    hi = grid[min(i + 1, len(grid) - 1)] if i < len(grid) - 1 else 1.0
    alpha = golden_section(magnitude, lo, hi, tol=1e-13 * max(hi, 1e-3))
    return alpha, theorem_bound(L, K_prime, e, alpha)


def constants_from_mu(mu_consts: MuConstants, alpha: float | None = None) -> TheoremConstants:
    """Coefficients obtained from a trial distribution after optimizing ``lambda``.

    K convention::

        3 M1^(1/3) D^(2/3) / 2^(2/3)          [x (1-alpha)^(-1/3)]
        M2 D^(5/6) / (2 M1)^(5/6)              [x (1-alpha)^(-1/6)]
        D / (8 M1)                             [x 1/alpha]
    """
    M1, M2, D = mu_consts.M1, mu_consts.M2, mu_consts.D_mu
    k1 = 3.0 * M1 ** (1.0 / 3.0) * D ** (2.0 / 3.0) / 2.0 ** (2.0 / 3.0)
    k2 = M2 * D ** (5.0 / 6.0) / (2.0 * M1) ** (5.0 / 6.0)
    k3 = D / (2.0 * M1) / 4.0
    if alpha is not None:
        if not 0.0 < alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        k1 *= (1.0 - alpha) ** (-1.0 / 3.0)
        k2 *= (1.0 - alpha) ** (-1.0 / 6.0)
        k3 /= alpha
    return TheoremConstants(C1=k1, C2=k2 * math.sqrt(TWO_PI_SQ), C3=k3 * TWO_PI_SQ,
                            k_convention=(k1, k2, k3), alpha=alpha)


def lambda_star(mu_consts: MuConstants, alpha: float) -> float:
    """Minimizer of ``M1 L / ((1-alpha) lambda^2) + lambda D L`` over ``lambda``."""
    if not 0.0 <= alpha < 1.0:
        raise DomainError("alpha must lie in [0, 1)")
    return (2.0 * mu_consts.M1 / ((1.0 - alpha) * mu_consts.D_mu)) ** (1.0 / 3.0)


def intermediate_bound(L: float, K: float, lam: float, alpha: float, mu_consts: MuConstants
                       ) -> float:
    """Upper bound on ``|E|`` before ``lambda`` is chosen; ``K`` is ``2 pi^2 K_prime``."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    M1, M2, D = mu_consts.M1, mu_consts.M2, mu_consts.D_mu
    first = (M1 / ((1.0 - alpha) * lam ** 2) + lam * D) * L
    second = M2 / ((1.0 - alpha) * lam ** 2.5) * math.sqrt(K * L)
    third = K / (4.0 * (1.0 - alpha) * alpha * lam ** 3)
    return first + second + third


def dirac_estimate(L: float, e: float = 1.0) -> float:
    return -C_DIRAC * e ** (2.0 / 3.0) * L


def lieb_oxford_bound(L: float, e: float = 1.0, C: float = LIEB_OXFORD) -> float:
    if not C > 0:
        raise DomainError("constant C must be positive")
    return -C * e ** (2.0 / 3.0) * L


def _species_integrals(species, weight_power):
    """``int [sum_i e_i^w rho_i]^(4/3)`` and ``int [sum_i rho_i]^(4/3)``."""
    if not species:
        raise DomainError("need at least one species")
    active = [sp for sp in species if sp.e > 0]
    if not active:
        return 0.0, 0.0
    edges = np.unique(np.concatenate([sp.number.edges() for sp in active]))
    four_pi = 4.0 * math.pi

    def weighted(r):
        return four_pi * r * r * sum(sp.e ** weight_power * sp.e * sp.number._eval(r)
                                     for sp in active) ** (4.0 / 3.0)

    def plain(r):
        return four_pi * r * r * sum(sp.e * sp.number._eval(r) for sp in active) ** (4.0 / 3.0)

    return panel_integral(weighted, edges)[0], panel_integral(plain, edges)[0]


def lieb79_bound(species: list[SpeciesDensity]) -> float:
    """``-8.52 {int [sum e_i^(2/3) rho_i]^(4/3)}^(3/4) [int rho^(4/3)]^(1/4)``."""
    w, L = _species_integrals(species, 2.0 / 3.0)
    return -LIEB79 * w ** 0.75 * L ** 0.25


def lieb_oxford_general(species: list[SpeciesDensity]) -> float:
    """``-1.68 {int [sum e_i rho_i]^(4/3)}^(1/2) [int rho^(4/3)]^(1/2)``."""
    w, L = _species_integrals(species, 1.0)
    return -LIEB_OXFORD * math.sqrt(w * L)

