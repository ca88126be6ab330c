"""Density functionals: ``L = int rho^(4/3)``, the ``H^(1/2)`` seminorm of
``sqrt(rho)`` by two independent routes, the direct Coulomb energy, and ``Q``.

Conventions
-----------
``K_prime`` is ``(sqrt rho, |p| sqrt rho) = int |2 pi k| |FT[sqrt rho](k)|^2 dk``
with ``FT[f](k) = int exp(-2 pi i k.x) f(x) dx``.  The unnormalized double
integral ``int int |sqrt rho(x) - sqrt rho(y)|^2 / |x - y|^4`` equals
``2 pi^2 K_prime``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .densities import Exponential, Gaussian, RadialDensity, UniformBall, radial_integral
from .exceptions import CoarseGridWarning, DivergenceError, DomainError
from .quadrature import cumulative_integral, gauss_legendre, panel_nodes, refine_edges

__all__ = [
    "FunctionalReport",
    "l43",
    "fourier_sqrt",
    "k_fourier",
    "k_double",
    "direct_energy",
    "q_ratio",
    "radial_potential",
    "functional_report",
]

FOUR_PI = 4.0 * math.pi
TWO_PI_SQ = 2.0 * math.pi ** 2
_MAX_MATRIX = 4_000_000
_SCAN_OCTAVES = 12


def l43(rho: RadialDensity, *, exact: bool = True, with_error: bool = False):
    """``int rho(x)^(4/3) dx``."""
    closed = None
    if exact:
        if isinstance(rho, Exponential):
            closed = 27.0 * rho.a ** (4.0 / 3.0) * math.pi / (8.0 * rho.b ** 3)
        elif isinstance(rho, Gaussian):
            closed = rho.a ** (4.0 / 3.0) * (0.75 * math.pi) ** 1.5 * rho.s ** 3
        elif isinstance(rho, UniformBall):
            closed = FOUR_PI / 3.0 * rho.R ** 3 * rho.rho0 ** (4.0 / 3.0)
    if closed is not None:
        value, err = closed, 0.0
    else:
        value, err = radial_integral(rho, lambda r, v: v ** (4.0 / 3.0))
    if not math.isfinite(value):
        raise DivergenceError("int rho^(4/3) diverges")
    return (value, err) if with_error else value


def _check_continuous(rho: RadialDensity):
    for p in rho.breakpoints:
        lo, hi = rho._eval(np.array([p * (1 - 1e-9), p * (1 + 1e-9)]))
        scale = max(float(rho._eval(np.array([0.0]))[0]), lo, hi)
        if abs(math.sqrt(lo) - math.sqrt(hi)) > 1e-6 * math.sqrt(scale):
            raise DivergenceError(
                f"sqrt(rho) jumps at r = {p:g}; the H^1/2 seminorm is infinite")


def _sqrt_support(rho: RadialDensity, rel: float) -> np.ndarray:
    """Edges truncated where ``r sqrt(rho)`` has dropped below ``rel`` of its peak."""
    edges = rho.edges()
    g = edges * np.sqrt(rho._eval(edges))
    big = np.nonzero(g > rel * g.max())[0]
    last = min(big[-1] + 1, len(edges) - 1) if len(big) else len(edges) - 1
    return edges[: last + 1]


def fourier_sqrt(rho: RadialDensity, k):
    """Fourier transform of ``sqrt(rho)`` at wavenumber(s) ``k > 0``.

    Radial form ``(2/k) int_0^inf r sqrt(rho(r)) sin(2 pi k r) dr``, computed
    by Gauss-Legendre panels no wider than one oscillation.
    """
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise DomainError("fourier_sqrt needs k > 0")
    flat = k.ravel()
    out = np.empty_like(flat)
    edges = _sqrt_support(rho, 1e-17)
    x0, w0 = panel_nodes(edges, 16)
    base = w0 * x0 * np.sqrt(rho._eval(x0))
    order = np.argsort(flat)
    cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    start = 0
    while start < len(order):
        kmax = flat[order[min(start + 7, len(order) - 1)]]
        octave = int(math.ceil(math.log2(kmax * rho.length_scale) + 1e-12))
        if octave not in cache:
            width = rho.length_scale * 2.0 ** (-octave)
            if width >= np.diff(edges).max():
                cache[octave] = (x0, base)
            else:
                x, w = panel_nodes(refine_edges(edges, width), 16)
                cache[octave] = (x, w * x * np.sqrt(rho._eval(x)))
        x, wf = cache[octave]
        chunk = int(min(8, max(1, _MAX_MATRIX // len(x))))
        idx = order[start:start + chunk]
        kk = flat[idx]
        out[idx] = (2.0 / kk) * (np.sin(2.0 * math.pi * np.outer(kk, x)) @ wf)
        start += chunk
    out = out.reshape(k.shape)
    return out if out.ndim else float(out)


def _k_integrand(rho, k):
    return 8.0 * math.pi ** 2 * k ** 3 * fourier_sqrt(rho, k) ** 2


def k_fourier(rho: RadialDensity, *, with_error: bool = False, cutoff: float = 1e-14):
    """``(sqrt rho, |p| sqrt rho) = 8 pi^2 int_0^inf k^3 |FT[sqrt rho](k)|^2 dk``.

    The k-range is truncated where the integrand falls below ``cutoff`` times
    its peak; a ``k^-5`` tail is appended analytically.
    """
    _check_continuous(rho)
    L = rho.length_scale
    scan = L ** -1 * 2.0 ** (np.arange(-24, 2 * _SCAN_OCTAVES + 1) / 2.0)
    vals = np.full(len(scan), np.nan)
    vals[:25] = _k_integrand(rho, scan[:25])
    i = 25
    imax = None
    while i < len(scan):
        vals[i:i + 2] = _k_integrand(rho, scan[i:i + 2])
        i += 2
        ipeak = int(np.nanargmax(vals))
        peak = vals[ipeak]
        below = np.nonzero(vals[ipeak:i] < cutoff * peak)[0]
        if len(below) and i - ipeak > 4:
            imax = ipeak + below[0]
            break
    ipeak = int(np.nanargmax(vals))
    peak = vals[ipeak]
    if not peak > 0:
        raise DomainError("sqrt(rho) has vanishing Fourier transform")
    if imax is None:
        # the integrand must fall faster than 1/k for a finite seminorm
        kv = scan[:i] * vals[:i]
        if kv[-1] > 1e-3 * kv[ipeak]:
            raise DivergenceError("k-integral of |FT sqrt rho|^2 |k| does not converge")
        imax = i - 1
    lead = np.nonzero(vals[:ipeak] > 1e-30 * peak)[0]
    imin = lead[0] if len(lead) else 0
    edges = np.concatenate(([0.0], scan[imin:imax + 1]))
    x, w = panel_nodes(edges, 16)
    fine = float(np.dot(w, _k_integrand(rho, x)))
    xc, wc = panel_nodes(edges, 8)
    coarse = float(np.dot(wc, _k_integrand(rho, xc)))
    kmax = scan[imax]
    tail = vals[imax] * kmax / 4.0
    value = fine + tail
    err = abs(fine - coarse) + tail
    return (value, err) if with_error else value


def _coarsen(edges: np.ndarray, max_panels: int) -> np.ndarray:
    if len(edges) - 1 <= max_panels:
        return edges
    stride = int(math.ceil((len(edges) - 1) / max_panels))
    keep = edges[::stride]
    if keep[-1] != edges[-1]:
        keep = np.append(keep, edges[-1])
    return keep


def _k_double_raw(rho, edges, n):
    R = edges[-1]
    x, w = panel_nodes(edges, n)
    g = np.sqrt(rho._eval(x))
    r = x[:, None]
    s = x[None, :]
    diff = r - s
    same = np.abs(diff) <= 1e-12 * (r + s)
    with np.errstate(divide="ignore", invalid="ignore"):
        dq = (g[:, None] - g[None, :]) / diff
        kern = r * s * (dq ** 2 - ((g[:, None] - g[None, :]) / (r + s)) ** 2)
    # diagonal: the divided difference tends to g'(r), the second term to zero
    h = 1e-4 * np.maximum(x, 1e-3 * rho.length_scale)
    gp = (np.sqrt(rho._eval(x + h)) - np.sqrt(rho._eval(np.abs(x - h)))) / (2 * h)
    kern = np.where(same, (x * x * gp * gp)[:, None], kern)
    inner = float(w @ kern @ w)
    # region r > R with g(r) = 0: int_R^inf r [1/(r-s)^2 - 1/(r+s)^2] dr in closed form
    T = np.log((R + x) / (R - x)) + x / (R - x) + x / (R + x)
    outer = 2.0 * float(np.dot(w, x * g * g * T))
    return 2.0 * (inner + outer)


def k_double(rho: RadialDensity, *, with_error: bool = False, max_panels: int = 90):
    """``(1 / 2 pi^2) int int |sqrt rho(x) - sqrt rho(y)|^2 / |x - y|^4 dx dy``.

    Angles are integrated analytically, leaving
    ``2 int int r s |g(r) - g(s)|^2 [1/(r-s)^2 - 1/(r+s)^2] dr ds`` with
    ``g = sqrt(rho)``; on the diagonal the integrand takes its limit
    ``r^2 g'(r)^2``.  Returns the value in the same normalization as
    :func:`k_fourier`.
    """
    _check_continuous(rho)
    edges = _coarsen(_sqrt_support(rho, 1e-13), max_panels)
    fine = _k_double_raw(rho, edges, 12)
    coarse = _k_double_raw(rho, edges, 8)
    err = abs(fine - coarse)
    if err > 1e-3 * abs(fine):
        warnings.warn("double-integral seminorm under-resolved; error estimate inflated",
                      CoarseGridWarning, stacklevel=2)
        err *= 10.0
    return (fine, err) if with_error else fine


def _union_edges(f: RadialDensity, g: RadialDensity) -> np.ndarray:
    e = np.union1d(f.edges(), g.edges())
    if not np.isfinite(e[-1]):
        raise DomainError("density has infinite extent")
    return e


def _direct(f, g, edges, n):
    x, w = panel_nodes(edges, n)
    fv, gv = f._eval(x), g._eval(x)
    Mf = cumulative_integral(lambda s: s * s * f._eval(s), edges, x, n)
    Mg = cumulative_integral(lambda s: s * s * g._eval(s), edges, x, n)
    return 0.5 * FOUR_PI ** 2 * float(np.dot(w, x * (fv * Mg + gv * Mf)))


def direct_energy(f: RadialDensity, g: RadialDensity, *, with_error: bool = False):
    """``D(f, g) = (1/2) int int f(x) g(y) / |x - y| dx dy`` for radial ``f, g``.

    Newton's theorem reduces the kernel to ``1 / max(|x|, |y|)``.
    """
    edges = _union_edges(f, g)
    fine = _direct(f, g, edges, 20)
    coarse = _direct(f, g, edges, 10)
    return (fine, abs(fine - coarse)) if with_error else fine


def q_ratio(rho: RadialDensity) -> float:
    """``K_prime / L``."""
    L = l43(rho)
    if L == 0:
        raise DomainError("L vanishes")
    return k_fourier(rho) / L


class radial_potential:
    """Newton potential ``V(u) = int rho(y) / |u - y| dy`` of a radial density.

    Tabulated once (as ``u V(u)`` against ``log u``) and interpolated by a
    cubic spline; beyond the density's extent ``V = N / u`` exactly.
    """

    def __init__(self, rho: RadialDensity, n: int = 6000):
        self.rho = rho
        edges = rho.edges()
        self.extent = float(edges[-1])
        lo = 1e-7 * rho.length_scale
        u = np.geomspace(lo, self.extent, n)
        M = cumulative_integral(lambda s: s * s * rho._eval(s), edges, u, 20)
        S = cumulative_integral(lambda s: s * rho._eval(s), edges, u, 20)
        s_total = cumulative_integral(lambda s: s * rho._eval(s), edges, [self.extent], 20)[0]
        self.charge = FOUR_PI * float(M[-1])
        self.v0 = FOUR_PI * s_total
        uv = FOUR_PI * (M + u * (s_total - S))
        self._lo = lo
        self._spline = CubicSpline(np.log(u), uv)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        far = u >= self.extent
        near = u <= self._lo
        mid = ~(far | near)
        out[far] = self.charge / u[far]
        out[near] = self.v0
        out[mid] = self._spline(np.log(u[mid])) / u[mid]
        return out

    def sphere_average(self, d: float, t):
        """Mean of ``V`` over the sphere of radius ``t`` centred at distance ``d``."""
        t = np.asarray(t, dtype=float)
        if d <= 1e-12 * max(self.rho.length_scale, 1.0):
            return self(t)
        lo = np.abs(d - t)
        hi = d + t
        x01, w01 = gauss_legendre(24)
        pts = lo[..., None] + (hi - lo)[..., None] * x01
        vals = pts * self(pts)
        integral = (hi - lo) * (vals @ w01)
        return integral / (2.0 * d * t)


@dataclass(frozen=True)
class FunctionalReport:
    """All functionals of one density, each with an error estimate.

    ``K_double`` is the unnormalized double integral (``2 pi^2 K_prime``);
    ``K_prime_double`` is the same route divided by ``2 pi^2``.
    """

    L: float
    L_err: float
    K_prime: float
    K_prime_err: float
    K_prime_double: float
    K_prime_double_err: float
    K_double: float
    K_double_err: float
    D_rho: float
    D_rho_err: float
    Q: float
    Q_err: float
    total_charge: float

    @property
    def route_agreement(self) -> float:
        return abs(self.K_prime_double - self.K_prime) / self.K_prime

    def to_dict(self) -> dict:
        d = asdict(self)
        d["route_agreement"] = self.route_agreement
        return d


def functional_report(rho: RadialDensity) -> FunctionalReport:
    L, eL = l43(rho, with_error=True)
    kf, ekf = k_fourier(rho, with_error=True)
    kd, ekd = k_double(rho, with_error=True)
    D, eD = direct_energy(rho, rho, with_error=True)
    Q = kf / L
    eQ = Q * (ekf / kf + (eL / L if L else 0.0))
    return FunctionalReport(
        L=L, L_err=eL, K_prime=kf, K_prime_err=ekf, K_prime_double=kd, K_prime_double_err=ekd,
        K_double=TWO_PI_SQ * kd, K_double_err=TWO_PI_SQ * ekd, D_rho=D, D_rho_err=eD,
        Q=Q, Q_err=eQ, total_charge=rho.total_charge,
    )
