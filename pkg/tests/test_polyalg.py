from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere_tangency.exact import Sphere
from sphere_tangency.lift import lift_point
from sphere_tangency.polyalg import (
    MultiPoly,
    PolynomialError,
    divides,
    evaluate,
    parse_poly,
    partial_derivative,
    q_poly,
    reduce,
    sphere_poly,
    tilde_substitute,
    to_text,
)

from conftest import rationals, sphere_with_point

N = 3
X1, X2, X3 = (MultiPoly.var(N, f"X{i}") for i in (1, 2, 3))
Y1, Y2 = MultiPoly.var(N, "Y1"), MultiPoly.var(N, "Y2")
UNIT = Sphere((0, 0, 0), 1)
S01 = sphere_poly(UNIT)


@st.composite
def polys(draw, n=N, max_degree=6, max_terms=6, y=True):
    nv = 2 * n - 1 if y else n
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        deg = draw(st.integers(0, max_degree))
        e = [0] * (2 * n - 1)
        for _ in range(deg):
            e[draw(st.integers(0, nv - 1))] += 1
        terms[tuple(e)] = draw(rationals(9, nonzero=True))
    return MultiPoly(n, terms)


class TestEvaluate:
    def test_sphere_poly_on_pole(self):
        assert evaluate(S01, (0, 0, 1, 0, 0)) == 0

    def test_q_poly_at_lift(self):
        q1 = q_poly((0, 0, 0), 1)
        assert evaluate(q1, (F(3, 5), 0, F(4, 5), F(3, 4), 0)) == 0

    def test_constant(self):
        assert evaluate(MultiPoly.constant(N, 7), (5, 1, 2, 3, 4)) == 7

    def test_dimension_mismatch(self):
        with pytest.raises(PolynomialError):
            evaluate(Y1, (1, 2))


class TestDerivative:
    def test_power(self):
        assert partial_derivative(Y1 ** 2 + X1, "Y1") == 2 * Y1

    def test_other_variable(self):
        assert partial_derivative(Y1 ** 2 + X1, "Y2").is_zero()

    def test_product(self):
        assert partial_derivative(S01 * Y1, "Y1") == S01

    @given(polys(), st.sampled_from(["X1", "X3", "Y1", "Y2"]))
    def test_degree_drops(self, p, v):
        d = partial_derivative(p, v)
        assert d.is_zero() or d.degree < p.degree


class TestTilde:
    def test_y_on_origin_sphere(self):
        assert tilde_substitute(Y1, UNIT) == X1

    def test_x_on_origin_sphere(self):
        assert tilde_substitute(X1, UNIT) == X1 * X3

    def test_constant(self):
        assert tilde_substitute(MultiPoly.constant(N, 5), UNIT) == 5

    def test_q_poly_collapses(self):
        assert tilde_substitute(q_poly((0, 0, 0), 1), UNIT).is_zero()

    @given(polys(), sphere_with_point())
    @settings(max_examples=100, deadline=None)
    def test_identity_at_lifted_points(self, p, sp):
        s, x = sp
        lp = lift_point(s, x)
        t = tilde_substitute(p, s)
        assert t.y_free()
        assert t.degree <= 2 * p.degree
        h = x[-1] - s.center[-1]
        assert evaluate(t, x) == evaluate(p, lp.coords) * h ** p.degree


class TestDivides:
    def test_multiple(self):
        assert divides(S01, S01 * X1)

    def test_not_multiple(self):
        assert not divides(S01, X1)

    def test_sum_of_multiples(self):
        assert divides(S01, S01 ** 2 + S01 * X2)

    def test_zero_dividend(self):
        assert divides(S01, MultiPoly.zero(N))

    def test_zero_divisor(self):
        with pytest.raises(PolynomialError):
            divides(MultiPoly.zero(N), X1)

    @given(polys(n=3, max_degree=4, max_terms=4), polys(n=3, max_degree=4, max_terms=4))
    @settings(max_examples=60, deadline=None)
    def test_divides_product(self, f, g):
        if f.is_zero():
            return
        assert divides(f, f * g)
        q, r = reduce(f * g, f)
        assert r.is_zero() and q * f == f * g

    @given(polys(n=3, max_degree=4), polys(n=3, max_degree=4))
    @settings(max_examples=60, deadline=None)
    def test_division_identity(self, a, f):
        if f.is_zero():
            return
        q, r = reduce(a, f)
        assert q * f + r == a

    @given(polys(n=3, max_degree=3, max_terms=3), sphere_with_point())
    @settings(max_examples=40, deadline=None)
    def test_sphere_divides_multiple(self, g, sp):
        s, _ = sp
        assert divides(sphere_poly(s), sphere_poly(s) * g)


class TestText:
    def test_canonical_print(self):
        p = 3 * X1 ** 2 * Y1 - F(1, 2) * X2 + 4
        assert to_text(p) == "3 * X1^2 * Y1 + -1/2 * X2 + 4"

    def test_zero(self):
        assert to_text(MultiPoly.zero(N)) == "0"

    def test_parse_loose(self):
        assert parse_poly("X1^2 - 2*X1*Y2 + 1/3", N) == X1 ** 2 - 2 * X1 * Y2 + F(1, 3)

    def test_parse_unknown_variable(self):
        with pytest.raises(PolynomialError):
            parse_poly("X4 + 1", N)

    @given(polys())
    def test_round_trip(self, p):
        assert parse_poly(to_text(p), N) == p
        assert to_text(parse_poly(to_text(p), N)) == to_text(p)
