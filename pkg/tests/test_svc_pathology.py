import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laplace_calc.errors import DepthTooLarge, DomainError, NoWitnessAtDepth
from laplace_calc.svc_pathology import (Boundary, InComponent, InGap, PathologicalFunction,
                                        build_svc, certified_points, difference_quotients,
                                        eval_f, locate, quotient_lower_bound, witness_pair)


@pytest.fixture(scope="module")
def pf3():
    return PathologicalFunction(build_svc(3))


@pytest.fixture(scope="module")
def pf12():
    return PathologicalFunction(build_svc(12))


def test_depth_one_components_and_gap():
    m = build_svc(1)
    assert m.components(1) == [(Fraction(0), Fraction(3, 8)), (Fraction(5, 8), Fraction(1))]
    g = m.gap(0)
    assert (g.a, g.b, g.level) == (Fraction(3, 8), Fraction(5, 8), 1)
    assert g.c == Fraction(1, 2) and g.length == Fraction(1, 4)


def test_locate_examples():
    m = build_svc(1)
    assert isinstance(locate(m, Fraction(1, 2)), InGap)
    assert isinstance(locate(m, Fraction(3, 8)), Boundary)
    assert isinstance(locate(m, 0), Boundary)
    assert isinstance(locate(m, 1), Boundary)
    inside = locate(m, Fraction(1, 8))
    assert isinstance(inside, InComponent) and inside.a == 0 and inside.b == Fraction(3, 8)
    with pytest.raises(DomainError):
        locate(m, Fraction(3, 2))


def test_depth_validation():
    with pytest.raises(ValueError):
        build_svc(0)
    with pytest.raises(DepthTooLarge):
        build_svc(27)


@given(st.integers(1, 14))
@settings(max_examples=14, deadline=None)
def test_closed_forms_exact(depth):
    m = build_svc(depth)
    for n in range(0, depth + 1):
        comps = m.components(n) if n <= 8 else None
        lefts, rights = m.component_numerators(n)
        assert lefts.size == 2 ** n
        lens = set((rights - lefts).tolist())
        assert len(lens) == 1
        assert Fraction(lens.pop(), m.denominator) == Fraction(2 ** n + 1, 2 ** (2 * n + 1))
        assert m.measure(n) == (1 + Fraction(1, 2 ** n)) / 2
        if comps is not None:
            assert all(a < b for a, b in comps)
    for n in range(1, depth + 1):
        gaps = m.gaps_at_level(n) if n <= 8 else None
        sel = m.gap_level == n
        assert int(sel.sum()) == 2 ** (n - 1)
        assert set((m.gap_b[sel] - m.gap_a[sel]).tolist()) == {m.denominator // 4 ** n}
        if gaps is not None:
            assert all(g.length == Fraction(1, 4 ** n) for g in gaps)


def test_gap_catalog_csv():
    text = build_svc(2).to_csv()
    assert text.splitlines() == ["level,a,b", "2,5/32,7/32", "1,3/8,5/8", "2,25/32,27/32"]


def test_eval_f_examples():
    pf = PathologicalFunction(build_svc(4))
    expected = 0.5 * math.sin(128.0)
    assert eval_f(pf, Fraction(7, 16)) == pytest.approx(0.3605188552508658, abs=1e-15)
    assert abs(eval_f(pf, 7 / 16) - expected) < 1e-14
    assert eval_f(pf, Fraction(3, 8)) == 0.0 and eval_f(pf, Fraction(5, 8)) == 0.0
    assert eval_f(pf, np.array([0.0, 1.0, 0.1])).tolist() == [0.0, 0.0, 0.0]
    with pytest.raises(DomainError):
        eval_f(pf, np.array([1.5]))


def test_zero_on_certified_points(pf12, rng):
    for a in certified_points(pf12.model, 20, rng):
        assert eval_f(pf12, a) == 0.0
        assert pf12(float(a)) == 0.0


def test_truncation_bound(pf12):
    assert pf12.truncation_bound == pytest.approx((4.0 ** -12 / 2) ** 0.25)


@given(st.integers(0, 2 ** 20), st.integers(1, 2 ** 20 - 1))
@settings(max_examples=80, deadline=None)
def test_float_path_agrees_with_exact_path(gi, frac_num):
    pf = PathologicalFunction(build_svc(8))
    m = pf.model
    g = m.gap(gi % m.gap_count)
    x = g.a + (g.b - g.a) * Fraction(frac_num, 2 ** 20)
    xf = float(x)
    exact = float(pf.eval_exact(Fraction(xf)))
    # long double phase: relative error of a few ulps times the phase size
    tau = float(min(Fraction(xf) - g.a, g.b - Fraction(xf)))
    if tau == 0.0:
        assert pf(xf) == exact == 0.0
        return
    ulp = float(np.finfo(np.longdouble).eps)
    bound = 1e-14 + 8 * ulp * tau ** -1.75 * tau ** 0.25
    assert abs(pf(xf) - exact) <= bound


def test_symmetric_about_midpoint(pf3):
    for i in range(pf3.model.gap_count):
        g = pf3.model.gap(i)
        for t in (Fraction(1, 1000), Fraction(1, 300)):
            tau = min(t, g.length / 2) / 2
            assert pf3.eval_exact(g.a + tau) == pf3.eval_exact(g.b - tau)


def test_continuity_probe(pf12):
    m = pf12.model
    for i in (0, 5, m.gap_count // 2, m.gap_count - 1):
        g = m.gap(i)
        for x in (g.a, g.b):
            for j in range(2 * g.level + 4, 40, 3):
                h = Fraction(1, 4 ** j)
                for y in (x - h, x + h):
                    assert abs(pf12.eval_exact(y)) <= float(h) ** 0.25 + 1e-300
        c = g.c
        fc = pf12.eval_exact(c)
        # |f'| <= 2 tau**-2.5 at the midpoint, tau the half length
        tau = float(g.length) / 2
        for j in (36, 42, 48):
            h = 4.0 ** -j
            for y in (c - Fraction(1, 4 ** j), c + Fraction(1, 4 ** j)):
                assert abs(pf12.eval_exact(y) - fc) <= 2 * tau ** -2.5 * h


WEIGHTED = [
    ((0.1, "plus", 4.0, 0.8), 0.00642880823616761),
    ((0.1, "plus", 50.0, 0.8), -0.0010873084961170413),
    ((0.9, "minus", 4.0, 0.85), 0.006428823671708861),
    ((0.9, "minus", 50.0, 0.85), -0.0010873084961170402),
    ((5 / 32, "plus", 200.0, 0.5), -0.0026677690318551023),
    ((3 / 8, "minus", 300.0, 0.3), 3.0553292591168065e-13),
    ((0.4, "plus", 20.0, 0.1), 0.05696494869336327),
    ((0.55, "minus", 30.0, 0.2), 0.3495542569512124),
]


@pytest.mark.parametrize("args,expected", WEIGHTED)
def test_weighted_integral_frozen(pf3, args, expected):
    # reference: per-gap-half quadrature in the original variable, with
    # a Fourier-weighted tail for the part accumulating at each endpoint
    r = pf3.weighted_integral(*args, power=2, tol=1e-12)
    assert abs(r.value - expected) <= 2e-12 + 1e-11 * abs(expected)


def test_weighted_integral_validation(pf3):
    with pytest.raises(ValueError):
        pf3.weighted_integral(0.5, "up", 1.0, 0.1)
    with pytest.raises(ValueError):
        pf3.weighted_integral(0.5, "plus", -1.0, 0.1)


def test_witness_properties(pf12, rng):
    m = pf12.model
    for a in certified_points(m, 5, rng):
        for k in range(2, 7):
            w = witness_pair(m, a, k)
            g = w.gap
            with mpmath.workprec(256):
                fu = pf12.eval_exact(w.u, 256)
                fv = pf12.eval_exact(w.v, 256)
                assert abs(fu - w.offset_u ** mpmath.mpf(0.25)) < mpmath.mpf(2) ** -200
                assert abs(fv) < mpmath.mpf(2) ** -150
                lo = mpmath.mpf(g.d_left.numerator) / g.d_left.denominator
                c = mpmath.mpf(g.c.numerator) / g.c.denominator
                hi = mpmath.mpf(g.d_right.numerator) / g.d_right.denominator
                if w.side == "plus":
                    assert lo < w.u < c and lo < w.v < c
                else:
                    assert c < w.u < hi and c < w.v < hi
            assert k + 1 <= g.level <= 2 * k


def test_difference_quotients_bound_and_growth(pf12, rng):
    a = certified_points(pf12.model, 1, rng)[0]
    qs = difference_quotients(pf12, a, 6)
    assert [q.k for q in qs] == [2, 3, 4, 5, 6]
    assert all(q.quotient_v == 0.0 for q in qs)
    assert all(q.quotient_u >= quotient_lower_bound(q.k) for q in qs)
    assert qs[-1].quotient_u > qs[0].quotient_u


def test_witness_errors(pf12):
    m = pf12.model
    a = m.frac(m.comp_a[3])
    with pytest.raises(NoWitnessAtDepth):
        witness_pair(m, a, 12)
    with pytest.raises(ValueError):
        witness_pair(m, a, 1)
    with pytest.raises(ValueError):
        witness_pair(m, Fraction(1, 2), 3)
    with pytest.raises(ValueError):
        witness_pair(m, Fraction(1, 3), 3)
