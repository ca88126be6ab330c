"""Gauss-Legendre quadrature on panels, with adaptive and cumulative variants.

All integrands are vectorized callables ``f(x: ndarray) -> ndarray``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "gauss_legendre",
    "panel_nodes",
    "panel_integral",
    "cumulative_integral",
    "adaptive_gauss_legendre",
    "geometric_edges",
    "refine_edges",
]


@lru_cache(maxsize=None)
def _leggauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on ``[a, b]``."""
    x, w = _leggauss01(int(n))
    h = b - a
    return a + h * x, h * w


def panel_nodes(edges, n: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights over consecutive panels ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x01, w01 = _leggauss01(int(n))
    h = np.diff(edges)
    x = (edges[:-1, None] + h[:, None] * x01[None, :]).ravel()
    w = (h[:, None] * w01[None, :]).ravel()
    return x, w


def panel_integral(f, edges, n: int = 20) -> tuple[float, float]:
    """Integrate ``f`` over ``[edges[0], edges[-1]]``.

    Returns ``(value, error)``; the error is the difference between the
    ``n``-point and ``n // 2``-point composite rules, which overestimates the
    error of the finer rule.
    """
    x, w = panel_nodes(edges, n)
    fine = float(np.dot(w, f(x)))
    xc, wc = panel_nodes(edges, max(n // 2, 2))
    coarse = float(np.dot(wc, f(xc)))
    return fine, abs(fine - coarse)


def cumulative_integral(f, edges, at, n: int = 20) -> np.ndarray:
    """Return ``int_{edges[0]}^{t} f`` for every ``t`` in ``at``.

    Points beyond ``edges[-1]`` receive the full integral; points below
    ``edges[0]`` receive zero.
    """
    edges = np.asarray(edges, dtype=float)
    at = np.asarray(at, dtype=float)
    x, w = panel_nodes(edges, n)
    per_panel = (w * f(x)).reshape(len(edges) - 1, n).sum(axis=1)
    full = np.concatenate(([0.0], np.cumsum(per_panel)))
    t = np.clip(at.ravel(), edges[0], edges[-1])
    k = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(edges) - 2)
    lo = edges[k]
    x01, w01 = _leggauss01(n)
    h = t - lo
    xs = lo[:, None] + h[:, None] * x01[None, :]
    partial = (h[:, None] * w01[None, :] * f(xs.ravel()).reshape(xs.shape)).sum(axis=1)
    return (full[k] + partial).reshape(at.shape)


def adaptive_gauss_legendre(f, a: float, b: float, *, breakpoints=(), rtol: float = 1e-13,
                            atol: float = 0.0, n: int = 16, max_intervals: int = 4000
                            ) -> tuple[float, float]:
    """Adaptive bisection quadrature of ``f`` on ``[a, b]``.

    Each interval is accepted when its ``n``-point estimate agrees with the sum
    over its two halves to within its share of the tolerance.  ``breakpoints``
    inside ``(a, b)`` seed the initial subdivision (kinks, support boundaries).
    """
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    x01, w01 = _leggauss01(n)

    def rule(lo, hi):
        h = hi - lo
        return h * float(np.dot(w01, f(lo + h * x01)))

    stack = [(lo, hi, rule(lo, hi)) for lo, hi in zip(cuts[:-1], cuts[1:])]
    budget = max(rtol * abs(sum(s[2] for s in stack)), atol)
    total_width = b - a
    result = 0.0
    error = 0.0
    count = len(stack)
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        refined = left + right
        diff = abs(refined - whole)
        share = (hi - lo) / total_width
        if (diff <= budget * share or diff <= rtol * abs(refined)
                or count >= max_intervals or mid in (lo, hi)):
            result += refined
            error += diff
        else:
            stack.append((lo, mid, left))
            stack.append((mid, hi, right))
            count += 1
    return result, error


def geometric_edges(scale: float, extent: float, *, inner: float = 2.0 ** -12,
                    ratio: float = 2.0, step: float = 1.0, breakpoints=()) -> np.ndarray:
    """Panel edges on ``[0, extent]``.

    Geometric from ``scale * inner`` up to ``scale`` (resolves the origin),
    then uniform steps of ``step * scale``.  ``breakpoints`` are inserted.
    """
    if scale <= 0 or extent <= 0:
        raise ValueError("scale and extent must be positive")
    geo = scale * ratio ** np.arange(np.floor(np.log(inner) / np.log(ratio)), 1)
    lin = np.arange(scale, extent, step * scale)
    e = np.concatenate(([0.0], geo, lin, [extent], np.asarray(breakpoints, dtype=float)))
    e = np.unique(e[(e >= 0.0) & (e <= extent)])
    return e


def refine_edges(edges, max_width: float) -> np.ndarray:
    """Split every panel wider than ``max_width`` into equal parts."""
    edges = np.asarray(edges, dtype=float)
    pieces = [edges[:1]]
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = max(int(np.ceil((hi - lo) / max_width)), 1)
        pieces.append(np.linspace(lo, hi, m + 1)[1:])
    return np.concatenate(pieces)
