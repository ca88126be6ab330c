"""Spherically symmetric single-particle densities.

Every density is a radial profile ``rho(r)``, immutable after construction.
Analytic families know their own charge in closed form; everything else is
integrated numerically on panels supplied by :meth:`RadialDensity.edges`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .exceptions import DomainError
from .quadrature import geometric_edges, panel_integral

__all__ = [
    "RadialDensity",
    "Exponential",
    "Gaussian",
    "UniformBall",
    "Grid",
    "Scaled",
    "SpeciesDensity",
    "make_exponential",
    "total_charge",
    "scale_tf",
    "dilate",
    "evaluate",
    "to_grid",
    "radial_integral",
    "density_from_descriptor",
]

FOUR_PI = 4.0 * math.pi


def _positive(name, value):
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


class RadialDensity:
    """Base class for radial densities ``rho(|x|)``."""

    #: True when the profile is given in closed form.
    analytic = False

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(np.isnan(r)):
            raise DomainError("density evaluated at negative radius")
        out = self._eval(r)
        return out if out.ndim else float(out)

    def _eval(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def length_scale(self) -> float:
        """Characteristic radius of the profile."""
        raise NotImplementedError

    @property
    def extent(self) -> float:
        """Radius beyond which ``rho`` is negligible (or exactly zero)."""
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Radii where the profile is not smooth."""
        return ()

    def edges(self) -> np.ndarray:
        """Panel edges on ``[0, extent]`` for radial quadrature."""
        return geometric_edges(self.length_scale, self.extent, breakpoints=self.breakpoints)

    def _charge_closed_form(self) -> float | None:
        return None

    @cached_property
    def total_charge(self) -> float:
        return total_charge(self)

    def descriptor(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Exponential(RadialDensity):
    """``rho(r) = a exp(-b r)``."""

    a: float
    b: float
    analytic = True

    def __post_init__(self):
        _positive("a", self.a)
        _positive("b", self.b)

    def _eval(self, r):
        return self.a * np.exp(-self.b * r)

    @property
    def length_scale(self):
        return 1.0 / self.b

    @property
    def extent(self):
        return 90.0 / self.b

    def _charge_closed_form(self):
        return 8.0 * math.pi * self.a / self.b ** 3

    def descriptor(self):
        return {"type": "exponential", "a": self.a, "b": self.b}


@dataclass(frozen=True, eq=False)
class Gaussian(RadialDensity):
    """``rho(r) = a exp(-(r/s)**2)``."""

    a: float
    s: float
    analytic = True

    def __post_init__(self):
        _positive("a", self.a)
        _positive("s", self.s)

    def _eval(self, r):
        return self.a * np.exp(-((r / self.s) ** 2))

    @property
    def length_scale(self):
        return self.s

    @property
    def extent(self):
        return 9.5 * self.s

    def edges(self):
        return geometric_edges(self.s, self.extent, step=0.25)

    def _charge_closed_form(self):
        return self.a * math.pi ** 1.5 * self.s ** 3

    def descriptor(self):
        return {"type": "gaussian", "a": self.a, "s": self.s}


@dataclass(frozen=True, eq=False)
class UniformBall(RadialDensity):
    """``rho(r) = rho0`` for ``r <= R`` and zero outside."""

    rho0: float
    R: float
    analytic = True

    def __post_init__(self):
        _positive("rho0", self.rho0)
        _positive("R", self.R)

    def _eval(self, r):
        return np.where(r <= self.R, self.rho0, 0.0)

    @property
    def length_scale(self):
        return self.R

    @property
    def extent(self):
        return self.R

    @property
    def breakpoints(self):
        return (self.R,)

    def edges(self):
        return geometric_edges(self.R, self.R, step=0.25)

    def _charge_closed_form(self):
        return FOUR_PI / 3.0 * self.R ** 3 * self.rho0

    def descriptor(self):
        return {"type": "uniform_ball", "rho0": self.rho0, "R": self.R}


@dataclass(frozen=True, eq=False)
class Grid(RadialDensity):
    """Tabulated profile on ascending positive radii.

    Between nodes a monotone cubic runs through ``(log r, log rho)`` when all
    values are positive, otherwise through ``(log r, rho)``.  Below ``r[0]``
    the first value is held; beyond ``r[-1]`` an exponential tail with decay
    fitted from the last two nodes is attached.
    """

    r: np.ndarray
    v: np.ndarray
    tail_decays: float = field(init=False)

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        v = np.array(self.v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or len(r) < 2:
            raise DomainError("grid needs matching 1-D radii and values, at least two nodes")
        if not np.all(np.isfinite(r)) or not np.all(np.isfinite(v)):
            raise DomainError("grid contains non-finite entries")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise DomainError("grid radii must be positive and strictly increasing")
        if np.any(v < 0):
            raise DomainError("grid values must be nonnegative")
        if not np.any(v > 0):
            raise DomainError("grid density is identically zero")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)
        if v[-1] == 0.0:
            decay = math.inf
        elif v[-2] == 0.0:
            decay = math.inf
        else:
            decay = math.log(v[-2] / v[-1]) / (r[-1] - r[-2])
        object.__setattr__(self, "tail_decays", decay)

    @cached_property
    def _log_values(self) -> bool:
        return bool(np.all(self.v > 0))

    @cached_property
    def _interp(self):
        y = np.log(self.v) if self._log_values else self.v
        return PchipInterpolator(np.log(self.r), y, extrapolate=False)

    def _eval(self, r):
        r0, r1 = self.r[0], self.r[-1]
        out = np.empty_like(r)
        inner = r < r0
        outer = r > r1
        mid = ~(inner | outer)
        out[inner] = self.v[0]
        y = self._interp(np.log(r[mid]))
        out[mid] = np.exp(y) if self._log_values else np.maximum(y, 0.0)
        if np.isinf(self.tail_decays):
            out[outer] = 0.0
        else:
            out[outer] = self.v[-1] * np.exp(-self.tail_decays * (r[outer] - r1))
        return out

    @cached_property
    def length_scale(self):
        w = self.r ** 2 * self.v
        return float(np.sum(w * self.r) / np.sum(w))

    @property
    def extent(self):
        if np.isinf(self.tail_decays):
            return float(self.r[-1])
        if self.tail_decays <= 0:
            return math.inf
        return float(self.r[-1] + 90.0 / self.tail_decays)

    @property
    def breakpoints(self):
        return (float(self.r[0]), float(self.r[-1]))

    def edges(self):
        ext = self.extent
        if not math.isfinite(ext):
            raise DomainError("grid density has a non-decaying tail; integrals diverge")
        stride = max(len(self.r) // 500, 1)
        inner = self.r[:-1:stride]
        parts = [[0.0], inner, [self.r[-1]]]
        if ext > self.r[-1]:
            step = 1.0 / self.tail_decays
            parts.append(np.arange(self.r[-1] + step, ext, step))
            parts.append([ext])
        return np.unique(np.concatenate(parts))

    def descriptor(self):
        return {"type": "grid", "r": self.r.tolist(), "rho": self.v.tolist()}


@dataclass(frozen=True, eq=False)
class Scaled(RadialDensity):
    """``rho(r) = amplitude * base(dilation * r)``."""

    base: RadialDensity
    dilation: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        _positive("dilation", self.dilation)
        _positive("amplitude", self.amplitude)

    def _eval(self, r):
        return self.amplitude * self.base._eval(self.dilation * r)

    @property
    def length_scale(self):
        return self.base.length_scale / self.dilation

    @property
    def extent(self):
        return self.base.extent / self.dilation

    @property
    def breakpoints(self):
        return tuple(p / self.dilation for p in self.base.breakpoints)

    def edges(self):
        return self.base.edges() / self.dilation

    def descriptor(self):
        return {"type": "scaled", "s": self.dilation, "amplitude": self.amplitude,
                "base": self.base.descriptor()}


@dataclass(frozen=True)
class SpeciesDensity:
    """Particles of one kind: charge ``e`` each, number density ``number``.

    ``number`` integrates to the particle count; the charge density is
    ``e * number``.
    """

    e: float
    number: RadialDensity

    def __post_init__(self):
        if not (self.e >= 0 and math.isfinite(self.e)):
            raise DomainError("species charge must be nonnegative")

    @property
    def charge_density(self) -> RadialDensity | None:
        if self.e == 0:
            return None
        return Scaled(self.number, 1.0, self.e)


def radial_integral(rho: RadialDensity, g, *, n: int = 20) -> tuple[float, float]:
    """``4 pi int_0^inf r^2 g(r, rho(r)) dr`` on the density's panels."""
    edges = rho.edges()
    if not np.isfinite(edges[-1]):
        raise DomainError("density has infinite extent")
    return panel_integral(lambda r: FOUR_PI * r * r * g(r, rho._eval(r)), edges, n)


def total_charge(rho: RadialDensity, *, exact: bool = True) -> float:
    """Total charge ``4 pi int r^2 rho dr``.

    With ``exact`` the closed form of an analytic family is used.
    """
    if exact:
        closed = rho._charge_closed_form()
        if closed is not None:
            return closed
    value, _ = radial_integral(rho, lambda r, v: v)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError("density has no finite positive charge")
    return value


def make_exponential(N: float, a: float) -> Exponential:
    """Exponential density of amplitude ``a`` carrying total charge ``N``."""
    N = _positive("N", N)
    a = _positive("a", a)
    return Exponential(a, (8.0 * math.pi * a / N) ** (1.0 / 3.0))


def scale_tf(f: RadialDensity, Z: float) -> Scaled:
    """Thomas-Fermi scaling ``x -> Z**2 f(Z**(1/3) x)``; charge scales by ``Z``."""
    Z = _positive("Z", Z)
    return Scaled(f, Z ** (1.0 / 3.0), Z ** 2)


def dilate(rho: RadialDensity, s: float, mass_preserving: bool = True) -> Scaled:
    """``x -> s**3 rho(s x)`` (or ``rho(s x)`` when not mass preserving)."""
    s = _positive("s", s)
    return Scaled(rho, s, s ** 3 if mass_preserving else 1.0)


def evaluate(rho: RadialDensity, r):
    return rho(r)


def to_grid(rho: RadialDensity, n: int = 2000, r_min: float = 1e-4, r_max: float = 40.0) -> Grid:
    """Sample ``rho`` on ``n`` log-spaced radii in ``[r_min, r_max]``."""
    if n < 2 or not 0 < r_min < r_max:
        raise DomainError("grid needs n >= 2 and 0 < r_min < r_max")
    r = np.geomspace(r_min, r_max, int(n))
    return Grid(r, rho(r))


def _pick(d, key, kind):
    if key not in d:
        raise DomainError(f"{kind} density descriptor missing field {key!r}")
    try:
        return float(d[key])
    except (TypeError, ValueError):
        raise DomainError(f"field {key!r} of {kind} density must be a number") from None


def density_from_descriptor(d: dict) -> RadialDensity:
    """Build a density from its JSON descriptor (see README for the forms)."""
    if not isinstance(d, dict) or "type" not in d:
        raise DomainError("density descriptor must be an object with a 'type' field")
    kind = d["type"]
    if kind == "exponential":
        has_b, has_n = "b" in d, "N" in d
        if has_b == has_n:
            raise DomainError("exponential density needs exactly one of 'b' or 'N'")
        a = _pick(d, "a", kind)
        if has_n:
            return make_exponential(_pick(d, "N", kind), a)
        return Exponential(a, _pick(d, "b", kind))
    if kind == "gaussian":
        s = _pick(d, "s", kind)
        if "N" in d:
            return Gaussian(_pick(d, "N", kind) / (math.pi ** 1.5 * s ** 3), s)
        return Gaussian(_pick(d, "a", kind), s)
    if kind == "uniform_ball":
        R = _pick(d, "R", kind)
        if "N" in d:
            return UniformBall(_pick(d, "N", kind) / (FOUR_PI / 3.0 * R ** 3), R)
        return UniformBall(_pick(d, "rho0", kind), R)
    if kind == "grid":
        for key in ("r", "rho"):
            if key not in d:
                raise DomainError(f"grid density descriptor missing field {key!r}")
        return Grid(d["r"], d["rho"])
    if kind == "tf_scaled":
        if "base" not in d:
            raise DomainError("tf_scaled density descriptor missing field 'base'")
        return scale_tf(density_from_descriptor(d["base"]), _pick(d, "Z", kind))
    if kind == "scaled":
        if "base" not in d:
            raise DomainError("scaled density descriptor missing field 'base'")
        return Scaled(density_from_descriptor(d["base"]), _pick(d, "s", kind),
                      float(d.get("amplitude", 1.0)))
    raise DomainError(f"unknown density type {kind!r}")
