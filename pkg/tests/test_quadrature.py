import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laplace_calc.errors import DomainError, NonFiniteEvaluation, ToleranceNotMet
from laplace_calc.quadrature import (GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, RealFunction,
                                     cumulative_integral, exp_weighted, geometric_breakpoints,
                                     integrate)


def test_gauss_subrule_is_seven_point_legendre():
    x, w = np.polynomial.legendre.leggauss(7)
    mask = GAUSS_WEIGHTS != 0
    np.testing.assert_allclose(NODES[mask], x, atol=1e-15)
    np.testing.assert_allclose(GAUSS_WEIGHTS[mask], w, atol=1e-15)


def test_kronrod_rule_exact_to_degree_22():
    for k in range(23):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(np.dot(KRONROD_WEIGHTS, NODES ** k) - exact) < 1e-14
    # degree 24 is not integrated exactly
    assert abs(np.dot(KRONROD_WEIGHTS, NODES ** 24) - 2.0 / 25) > 1e-10


def test_gauss_rule_exact_to_degree_13():
    for k in range(14):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(np.dot(GAUSS_WEIGHTS, NODES ** k) - exact) < 1e-14


def test_integrate_smooth():
    r = integrate(np.sin, 0.0, math.pi, 1e-12)
    assert abs(r.value - 2.0) < 1e-12
    assert r.evaluations >= 15 and r.panels >= 1


def test_integrate_endpoint_singularity():
    r = integrate(lambda t: 1.0 / np.sqrt(t), 0.0, 1.0, 1e-9)
    assert abs(r.value - 2.0) < 1e-8


def test_integrate_with_breakpoints():
    r = integrate(np.abs, -1.0, 2.0, 1e-12, points=[0.0])
    assert abs(r.value - 2.5) < 1e-13


def test_zero_width():
    assert integrate(np.exp, 1.0, 1.0).value == 0.0


def test_errors():
    f = RealFunction(np.exp, 0.0, 1.0)
    with pytest.raises(DomainError):
        integrate(f, 0.0, 2.0)
    with pytest.raises(DomainError):
        integrate(f, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(f, 0.0, 1.0, tol=0.0)
    with pytest.raises(NonFiniteEvaluation):
        integrate(lambda t: np.full_like(t, np.nan), 0.0, 1.0)


def test_tolerance_not_met_is_raised():
    with pytest.raises(ToleranceNotMet):
        integrate(lambda t: np.sin(1.0 / t), 1e-12, 1.0, 1e-15)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8),
       st.floats(-3, 3), st.floats(0.01, 4))
@settings(max_examples=60, deadline=None)
def test_polynomials_match_antiderivative(coefs, a, width):
    p = np.polynomial.Polynomial(coefs)
    b = a + width
    P = p.integ()
    r = integrate(p, a, b, 1e-12)
    assert abs(r.value - (P(b) - P(a))) <= 1e-10 * (1 + np.sum(np.abs(coefs)) * 10 ** len(coefs))


@given(st.floats(-2, 2), st.floats(0.1, 2), st.floats(0.05, 0.95))
@settings(max_examples=40, deadline=None)
def test_additivity(a, width, frac):
    b, c = a + width, a + frac * width
    f = lambda t: np.exp(np.sin(3 * t))
    whole = integrate(f, a, b, 1e-13).value
    parts = integrate(f, a, c, 1e-13).value + integrate(f, c, b, 1e-13).value
    assert abs(whole - parts) < 1e-11


def test_cumulative_matches_integrate():
    grid = np.linspace(0.0, 2.0, 9)
    cells, cum, err = cumulative_integral(np.cos, grid, 1e-12)
    np.testing.assert_allclose(cum, np.sin(grid), atol=1e-12)
    assert cells.shape == (8,) and err >= 0


def test_geometric_breakpoints_increasing():
    pts = geometric_breakpoints(100.0, 0.5)
    assert pts[0] == 0.0 and pts[-1] == pytest.approx(0.5)
    assert np.all(np.diff(pts) > 0)


@given(st.floats(1, 1e4), st.floats(0.01, 1.0), st.sampled_from(["plus", "minus"]),
       st.sampled_from([1, 2]))
@settings(max_examples=50, deadline=None)
def test_exp_weighted_constant(s, delta, side, power):
    # s^p * int_0^delta e^{-st} dt = s^{p-1} (1 - e^{-s delta})
    f = RealFunction(lambda t: np.ones_like(t), -2.0, 2.0)
    v = exp_weighted(f, 0.5, side, s, delta, power, 1e-10).value
    exact = s ** (power - 1) * -math.expm1(-s * delta)
    assert abs(v - exact) <= 1e-9 * max(1.0, s ** (power - 1))


def test_exp_weighted_linear_minus_side():
    # s^2 int_0^delta e^{-st} (x - t) dt with x = 0 tends to -1
    f = RealFunction(lambda t: t, -1.0, 1.0)
    v = exp_weighted(f, 0.0, "minus", 1e3, 0.5, 2, 1e-10).value
    assert abs(v + 1.0) < 1e-9


def test_exp_weighted_validation():
    f = RealFunction(np.sin, 0.0, 1.0)
    with pytest.raises(ValueError):
        exp_weighted(f, 0.5, "up", 1.0, 0.1, 2, 1e-8)
    with pytest.raises(ValueError):
        exp_weighted(f, 0.5, "plus", -1.0, 0.1, 2, 1e-8)
    with pytest.raises(ValueError):
        exp_weighted(f, 0.5, "plus", 1.0, 0.1, 3, 1e-8)
    with pytest.raises(DomainError):
        exp_weighted(f, 0.5, "plus", 1.0, 0.9, 2, 1e-8)
