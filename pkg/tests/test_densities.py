import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coulomb_bound.densities import (Exponential, Gaussian, Grid, Scaled, SpeciesDensity,
                                     UniformBall, density_from_descriptor, dilate, evaluate,
                                     make_exponential, scale_tf, to_grid, total_charge)
from coulomb_bound.exceptions import DomainError

positive = st.floats(0.05, 20.0)


def test_make_exponential_unit_b():
    assert make_exponential(8 * math.pi, 1.0).b == pytest.approx(1.0, rel=1e-15)


def test_make_exponential_unit_charge():
    assert make_exponential(1.0, 1.0).b == pytest.approx((8 * math.pi) ** (1 / 3))
    assert make_exponential(1.0, 1.0).b == pytest.approx(2.9292, abs=1e-4)


def test_make_exponential_round_trip():
    rho = make_exponential(5.0, 2.0)
    assert total_charge(rho) == pytest.approx(5.0, rel=1e-10)
    assert total_charge(rho, exact=False) == pytest.approx(5.0, rel=1e-10)


@pytest.mark.parametrize("N,a", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_make_exponential_rejects_nonpositive(N, a):
    with pytest.raises(DomainError):
        make_exponential(N, a)


def test_closed_form_charges():
    assert total_charge(Exponential(2.0, 1.5)) == pytest.approx(8 * math.pi * 2 / 1.5 ** 3)
    assert total_charge(UniformBall(2.0, 1.5)) == pytest.approx(4 * math.pi / 3 * 1.5 ** 3 * 2)
    assert total_charge(Gaussian(1.0, 1.0)) == pytest.approx(math.pi ** 1.5)


@pytest.mark.parametrize("rho", [Exponential(2.0, 1.5), UniformBall(2.0, 1.5), Gaussian(0.7, 2.0)])
def test_quadrature_charge_matches_closed_form(rho):
    assert total_charge(rho, exact=False) == pytest.approx(total_charge(rho), rel=1e-12)


def test_grid_charge_default_grid():
    g = to_grid(Exponential(1.0, 1.0), 2000, 1e-4, 40.0)
    assert total_charge(g) == pytest.approx(8 * math.pi, rel=1e-6)


def test_grid_interpolation_accuracy():
    g = to_grid(Exponential(1.0, 1.0))
    assert float(g(0.5)) == pytest.approx(math.exp(-0.5), abs=1e-6)
    r = np.geomspace(1e-4, 40.0, 777)
    np.testing.assert_allclose(g(r), np.exp(-r), rtol=1e-6)


def test_grid_round_trip_gaussian():
    base = Gaussian(1.0, 1.0)
    g = to_grid(base, 2000, 1e-4, 6.0)
    r = np.geomspace(1e-4, 6.0, 501)
    np.testing.assert_allclose(g(r), base(r), rtol=1e-6)


def test_grid_tail_is_fitted_exponential():
    g = to_grid(Exponential(1.0, 1.0), 500, 1e-3, 20.0)
    assert g.tail_decays == pytest.approx(1.0, rel=1e-10)
    assert float(g(30.0)) == pytest.approx(math.exp(-30.0), rel=1e-8)


def test_grid_non_decaying_tail_is_an_error():
    g = Grid([0.1, 1.0, 2.0], [1.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        total_charge(g, exact=False)


@pytest.mark.parametrize("r,v", [([1.0, 0.5], [1, 1]), ([0.0, 1.0], [1, 1]),
                                 ([1.0, 2.0], [1, -1]), ([1.0, 2.0], [0, 0]),
                                 ([1.0], [1.0]), ([1.0, 2.0], [1.0, math.nan])])
def test_grid_validation(r, v):
    with pytest.raises(DomainError):
        Grid(r, v)


def test_evaluate_examples():
    assert float(evaluate(Exponential(2.0, 1.0), 0.0)) == 2.0
    assert float(evaluate(UniformBall(1.0, 1.0), 2.0)) == 0.0
    with pytest.raises(DomainError):
        evaluate(Exponential(1.0, 1.0), -0.1)


def test_scale_tf_identity_and_charge():
    f = Exponential(1.0, 1.0)
    r = np.linspace(0, 5, 11)
    np.testing.assert_allclose(scale_tf(f, 1.0)(r), f(r), rtol=1e-15)
    assert total_charge(scale_tf(f, 8.0), exact=False) == pytest.approx(64 * math.pi, rel=1e-9)


def test_scale_tf_rejects_nonpositive():
    with pytest.raises(DomainError):
        scale_tf(Exponential(1.0, 1.0), 0.0)


@pytest.mark.parametrize("s", [0.1, 1.0, 3.7, 10.0])
def test_dilation_preserves_charge(s):
    rho = Exponential(1.0, 1.0)
    assert total_charge(dilate(rho, s), exact=False) == pytest.approx(8 * math.pi, rel=1e-10)


def test_dilation_identity():
    rho = Gaussian(1.0, 1.0)
    r = np.linspace(0, 4, 9)
    np.testing.assert_allclose(dilate(rho, 1.0)(r), rho(r))
    with pytest.raises(DomainError):
        dilate(rho, -1.0)


@given(a=positive, b=positive, Z=st.floats(0.1, 60.0))
def test_tf_charge_law_property(a, b, Z):
    f = Exponential(a, b)
    assert total_charge(scale_tf(f, Z), exact=False) == \
        pytest.approx(Z * total_charge(f), rel=1e-9)


@given(kind=st.sampled_from(["exp", "gauss", "ball"]), a=positive, b=positive,
       r=st.lists(st.floats(0.0, 1e3), min_size=1, max_size=20))
def test_densities_are_nonnegative(kind, a, b, r):
    rho = {"exp": Exponential(a, b), "gauss": Gaussian(a, b), "ball": UniformBall(a, b)}[kind]
    for d in (rho, dilate(rho, 2.0), scale_tf(rho, 3.0)):
        assert np.all(d(np.array(r)) >= 0)


def test_species_density():
    sp = SpeciesDensity(2.0, Exponential(1 / math.pi, 2.0))
    assert total_charge(sp.charge_density) == pytest.approx(2.0)
    assert SpeciesDensity(0.0, Exponential(1.0, 1.0)).charge_density is None
    with pytest.raises(DomainError):
        SpeciesDensity(-1.0, Exponential(1.0, 1.0))


def test_descriptors_round_trip():
    cases = [Exponential(1.5, 0.5), Gaussian(2.0, 0.3), UniformBall(0.2, 3.0),
             scale_tf(Exponential(1.0, 1.0), 8.0), Scaled(Gaussian(1.0, 1.0), 2.0, 3.0),
             Grid([0.1, 0.5, 1.0], [3.0, 2.0, 1.0])]
    r = np.linspace(0, 3, 13)
    for rho in cases:
        back = density_from_descriptor(rho.descriptor())
        np.testing.assert_allclose(back(r), rho(r), rtol=1e-14)


def test_descriptor_charge_forms():
    rho = density_from_descriptor({"type": "exponential", "a": 1, "N": 8 * math.pi})
    assert rho.b == pytest.approx(1.0)
    g = density_from_descriptor({"type": "gaussian", "s": 2.0, "N": 3.0})
    assert total_charge(g) == pytest.approx(3.0)
    u = density_from_descriptor({"type": "uniform_ball", "R": 2.0, "N": 3.0})
    assert total_charge(u) == pytest.approx(3.0)


@pytest.mark.parametrize("d,field", [
    ({"type": "exponential", "a": 1}, "'b' or 'N'"),
    ({"type": "exponential", "a": 1, "b": 1, "N": 2}, "'b' or 'N'"),
    ({"type": "exponential", "b": 1}, "'a'"),
    ({"type": "gaussian", "a": "x", "s": 1}, "'a'"),
    ({"type": "grid", "r": [1, 2]}, "'rho'"),
    ({"type": "tf_scaled", "Z": 2}, "'base'"),
    ({"type": "nope"}, "nope"),
    ({"a": 1}, "type"),
])
def test_descriptor_errors_name_the_field(d, field):
    with pytest.raises(DomainError, match=field):
        density_from_descriptor(d)
