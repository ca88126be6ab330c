"""Trial smearing distributions supported in the unit ball.

A :class:`TrialMu` is a bounded radial profile ``mu(|z|)`` on ``|z| <= 1``
with unit mass.  It exposes two cumulative pieces, from which every derived
quantity follows by one-dimensional quadrature:

* ``mass(t)  = 4 pi int_0^t s^2 mu(s) ds`` (charge inside radius ``t``)
* ``shell(t) = 4 pi int_t^1 s mu(s) ds``    (potential at ``t`` of the charge outside)

The smeared potential is ``phi(t) = mass(t) / t + shell(t)`` and the
remainder ``R(t) = 1/t - phi(t) = (1 - mass(t)) / t - shell(t)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import beta, betainc

from .exceptions import DomainError
from .quadrature import adaptive_gauss_legendre

__all__ = [
    "TrialMu",
    "Uniform",
    "PowerLaw",
    "GridMu",
    "MuConstants",
    "phi",
    "remainder_R",
    "potential_Phi",
    "m1",
    "m2",
    "self_energy",
    "mu_objective",
    "mu_constants",
    "mu_from_descriptor",
    "parse_mu_spec",
]

FOUR_PI = 4.0 * math.pi


class TrialMu:
    """Radial unit-mass profile on the unit ball."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 1.0, self._profile(np.minimum(t, 1.0)), 0.0)
        return out if out.ndim else float(out)

    def _profile(self, t):
        raise NotImplementedError

    def mass(self, t):
        raise NotImplementedError

    def shell(self, t):
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def descriptor(self) -> dict:
        raise NotImplementedError

    @cached_property
    def constants(self) -> MuConstants:
        return mu_constants(self)


@dataclass(frozen=True, eq=False)
class Uniform(TrialMu):
    """Constant density ``3 / (4 pi)`` on the unit ball."""

    def _profile(self, t):
        return np.full_like(t, 3.0 / FOUR_PI)

    def mass(self, t):
        t = np.minimum(np.asarray(t, dtype=float), 1.0)
        return t ** 3

    def shell(self, t):
        t = np.minimum(np.asarray(t, dtype=float), 1.0)
        return 1.5 * (1.0 - t * t)

    def descriptor(self):
        return {"type": "uniform"}


@dataclass(frozen=True, eq=False)
class PowerLaw(TrialMu):
    """``mu(z)`` proportional to ``(1 - |z|)**p``; ``p = 0`` is :class:`Uniform`."""

    p: float

    def __post_init__(self):
        if not (self.p >= 0 and math.isfinite(self.p)):
            raise DomainError("power-law exponent must be a finite p >= 0")

    @cached_property
    def _norm(self):
        # 4 pi c B(3, p + 1) = 1
        return 1.0 / (FOUR_PI * beta(3.0, self.p + 1.0))

    def _profile(self, t):
        return self._norm * (1.0 - t) ** self.p

    def mass(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        return betainc(3.0, self.p + 1.0, t)

    def shell(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        b2 = beta(2.0, self.p + 1.0)
        return FOUR_PI * self._norm * b2 * (1.0 - betainc(2.0, self.p + 1.0, t))

    def descriptor(self):
        return {"type": "power_law", "p": self.p}


@dataclass(frozen=True, eq=False)
class GridMu(TrialMu):
    """Piecewise-linear profile through ``(t, mu)`` nodes, renormalized to unit mass.

    Nodes must lie in ``[0, 1]``; the profile is zero beyond the last node.
    ``renormalization`` is the factor applied to the supplied values.
    """

    t: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.mu, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise DomainError("grid mu needs matching 1-D nodes and values")
        if t[0] < 0 or t[-1] > 1 or np.any(np.diff(t) <= 0):
            raise DomainError("grid mu nodes must increase strictly within [0, 1]")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("grid mu values must be finite and nonnegative")
        if t[0] > 0:
            t = np.concatenate(([0.0], t))
            v = np.concatenate(([v[0]], v))
        # exact shell moments of a linear segment: int s^k (c0 + c1 s) ds
        slope = np.diff(v) / np.diff(t)
        c0 = v[:-1] - slope * t[:-1]
        lo, hi = t[:-1], t[1:]

        def moment(k, a, b):
            return c0 * (b ** (k + 1) - a ** (k + 1)) / (k + 1) + slope * (b ** (k + 2) - a ** (k + 2)) / (k + 2)

        raw_mass = FOUR_PI * moment(2, lo, hi).sum()
        if not raw_mass > 0:
            raise DomainError("grid mu has zero mass")
        scale = 1.0 / raw_mass
        v = v * scale
        c0 = c0 * scale
        slope = slope * scale
        for arr in (t, v, c0, slope):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "mu", v)
        object.__setattr__(self, "renormalization", scale)
        object.__setattr__(self, "_c0", c0)
        object.__setattr__(self, "_slope", slope)
        # moment() now sees the renormalized coefficients
        m2 = FOUR_PI * moment(2, lo, hi)
        m1 = FOUR_PI * moment(1, lo, hi)
        object.__setattr__(self, "_cum_mass", np.concatenate(([0.0], np.cumsum(m2))))
        object.__setattr__(self, "_cum_shell", np.concatenate(([0.0], np.cumsum(m1))))

    def _segment(self, t):
        k = np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, len(self.t) - 2)
        return k

    def _profile(self, t):
        inside = t <= self.t[-1]
        return np.where(inside, np.interp(t, self.t, self.mu), 0.0)

    def _partial(self, kpow, t):
        """``4 pi int_{t_k}^{t} s^kpow mu`` within the segment containing ``t``."""
        k = self._segment(t)
        a = self.t[k]
        c0, c1 = self._c0[k], self._slope[k]
        val = c0 * (t ** (kpow + 1) - a ** (kpow + 1)) / (kpow + 1) + c1 * (t ** (kpow + 2) - a ** (kpow + 2)) / (kpow + 2)
        return k, FOUR_PI * val

    def mass(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.t[-1])
        k, part = self._partial(2, t)
        return self._cum_mass[k] + part

    def shell(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.t[-1])
        k, part = self._partial(1, t)
        return self._cum_shell[-1] - (self._cum_shell[k] + part)

    @property
    def breakpoints(self):
        return tuple(float(x) for x in self.t[1:] if x < 1.0)

    def descriptor(self):
        return {"type": "grid", "t": self.t.tolist(), "mu": self.mu.tolist()}


@dataclass(frozen=True)
class MuConstants:
    """Constants derived from a trial distribution (with quadrature errors)."""

    M1: float
    M2: float
    D_mu: float
    errors: dict

    @property
    def objective(self) -> float:
        return self.D_mu ** (2.0 / 3.0) * self.M1 ** (1.0 / 3.0)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise DomainError("radius t must be positive")
    return t


def phi(mu: TrialMu, t):
    """Potential ``int min(1/t, 1/|y|) mu(y) dy`` of the smeared unit charge."""
    t = _check_t(t)
    inside = np.minimum(t, 1.0)
    out = np.where(t >= 1.0, 1.0 / t, mu.mass(inside) / t + mu.shell(inside))
    return out if out.ndim else float(out)


def remainder_R(mu: TrialMu, t):
    """``1/t - phi(t)``; vanishes identically for ``t >= 1``."""
    t = _check_t(t)
    inside = np.minimum(t, 1.0)
    val = (1.0 - mu.mass(inside)) / t - mu.shell(inside)
    out = np.where(t >= 1.0, 0.0, np.maximum(val, 0.0))
    return out if out.ndim else float(out)


def potential_Phi(z):
    """Potential of a uniform charge ``4 pi / 3`` spread over the unit ball."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("radius must be nonnegative")
    with np.errstate(divide="ignore"):
        out = np.where(z < 1.0, FOUR_PI / 3.0 + FOUR_PI / 6.0 * (1.0 - z * z), FOUR_PI / 3.0 / z)
    return out if out.ndim else float(out)


def _integrate(mu, f, rtol=1e-14):
    return adaptive_gauss_legendre(f, 0.0, 1.0, breakpoints=mu.breakpoints, rtol=rtol, n=20)


def m1(mu: TrialMu, *, with_error: bool = False):
    """``(2 pi / 3) int_{|z|<1} |z|^2 mu(z) dz``."""
    val, err = _integrate(mu, lambda t: (2.0 * math.pi / 3.0) * FOUR_PI * t ** 4 * mu(t))
    return (val, err) if with_error else val


def m2(mu: TrialMu, *, with_error: bool = False):
    """``(int |z|^4 R(|z|)^2 dz)^(1/2)``; ``R`` vanishes outside the unit ball."""
    sq, err = _integrate(mu, lambda t: FOUR_PI * t ** 6 * remainder_R(mu, t) ** 2)
    val = math.sqrt(sq)
    return (val, err / (2 * val) if val else err ** 0.5) if with_error else val


def self_energy(mu: TrialMu, *, with_error: bool = False):
    """``D(mu, mu) = (1/2) int int mu(x) mu(y) / |x - y|``.

    Uses the min-kernel reduction ``4 pi int_0^1 t mu(t) mass(t) dt``.
    """
    val, err = _integrate(mu, lambda t: FOUR_PI * t * mu(t) * mu.mass(t))
    return (val, err) if with_error else val


def mu_objective(mu: TrialMu) -> float:
    """``D(mu, mu)**(2/3) * M1**(1/3)``; the uniform ball minimizes it."""
    return self_energy(mu) ** (2.0 / 3.0) * m1(mu) ** (1.0 / 3.0)


def mu_constants(mu: TrialMu) -> MuConstants:
    a, ea = m1(mu, with_error=True)
    b, eb = m2(mu, with_error=True)
    d, ed = self_energy(mu, with_error=True)
    return MuConstants(M1=a, M2=b, D_mu=d, errors={"M1": ea, "M2": eb, "D_mu": ed})


def mu_from_descriptor(d: dict) -> TrialMu:
    if not isinstance(d, dict) or "type" not in d:
        raise DomainError("mu descriptor must be an object with a 'type' field")
    kind = d["type"]
    if kind == "uniform":
        return Uniform()
    if kind == "power_law":
        if "p" not in d:
            raise DomainError("power_law mu descriptor missing field 'p'")
        return PowerLaw(float(d["p"]))
    if kind == "grid":
        for key in ("t", "mu"):
            if key not in d:
                raise DomainError(f"grid mu descriptor missing field {key!r}")
        return GridMu(d["t"], d["mu"])
    raise DomainError(f"unknown mu type {kind!r}")


def parse_mu_spec(spec: str) -> TrialMu:
    """Parse ``uniform``, ``power_law:<p>`` or a JSON descriptor."""
    spec = spec.strip()
    if spec.startswith("{"):
        try:
            d = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise DomainError(f"mu descriptor is not valid JSON: {exc.msg}") from None
        return mu_from_descriptor(d)
    name, _, arg = spec.partition(":")
    if name == "uniform" and not arg:
        return Uniform()
    if name == "power_law" and arg:
        try:
            return PowerLaw(float(arg))
        except ValueError:
            raise DomainError(f"bad power-law exponent {arg!r}") from None
    raise DomainError(f"unrecognized mu spec {spec!r}")
