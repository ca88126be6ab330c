import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_bound.quadrature import (adaptive_gauss_legendre, cumulative_integral,
                                      gauss_legendre, geometric_edges, panel_integral,
                                      refine_edges)


@given(deg=st.integers(0, 39), a=st.floats(-3, 0), b=st.floats(0.1, 3))
def test_gauss_legendre_exact_for_polynomials(deg, a, b):
    x, w = gauss_legendre(20, a, b)
    exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
    assert np.dot(w, x ** deg) == pytest.approx(exact, rel=1e-12, abs=1e-12 * max(abs(a), b) ** (deg + 1))


def test_panel_integral_error_estimate():
    val, err = panel_integral(np.exp, np.linspace(0, 2, 5))
    assert val == pytest.approx(math.e ** 2 - 1, rel=1e-14)
    assert err < 1e-12


def test_cumulative_integral_at_arbitrary_points():
    edges = np.linspace(0, 4, 9)
    at = np.array([0.0, 0.3, 1.0, 2.71, 4.0])
    np.testing.assert_allclose(cumulative_integral(np.cos, edges, at), np.sin(at), atol=1e-14)


def test_adaptive_kinked_integrand():
    f = lambda x: np.abs(x - 0.3) ** 0.5
    exact = (2 / 3) * (0.3 ** 1.5 + 0.7 ** 1.5)
    val, err = adaptive_gauss_legendre(f, 0.0, 1.0, breakpoints=[0.3], rtol=1e-12)
    assert val == pytest.approx(exact, rel=1e-10)
    assert err < 1e-9


def test_adaptive_endpoint_singularity():
    val, _ = adaptive_gauss_legendre(lambda x: x ** -0.5, 0.0, 1.0, rtol=1e-10)
    assert val == pytest.approx(2.0, rel=1e-8)


def test_geometric_and_refined_edges():
    e = geometric_edges(1.0, 50.0)
    assert e[0] == 0.0 and e[-1] == pytest.approx(50.0)
    assert np.all(np.diff(e) > 0)
    r = refine_edges(e, 0.5)
    assert np.max(np.diff(r)) <= 0.5 + 1e-12
    assert set(np.round(e, 12)) <= set(np.round(r, 12))
