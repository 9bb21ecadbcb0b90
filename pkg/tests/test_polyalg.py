"""Exact polynomial arithmetic: examples with independent oracles, then laws."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratlab.polyalg import (
    ParseError,
    Polynomial,
    RationalFunction,
    divides_exactly,
    jacobian,
    normal_form,
    parse_polynomial,
    parse_rational_function,
    poly_gcd,
)

from conftest import points_st, polynomials_st


class TestEval:
    def test_cone_point_by_pythagoras(self, xyz):
        s, t, u = xyz
        assert (s**2 + t**2 - u**2).eval([3, 4, 5]) == 0

    def test_three_lines_diagonal(self, xy):
        x, y = xy
        assert (x**2 * y - x * y**2).eval([1, 1]) == 0

    def test_hand_arithmetic(self, xy):
        x, y = xy
        # 2 * (1/2) * (1/3) = 1/3
        assert (2 * x * y).eval([Fraction(1, 2), Fraction(1, 3)]) == Fraction(1, 3)

    def test_float_evaluation(self, xy):
        x, y = xy
        assert (x * y).eval([0.5, 4.0]) == pytest.approx(2.0)

    def test_dimension_mismatch(self, xy):
        x, _ = xy
        with pytest.raises(ValueError):
            x.eval([1])


class TestArith:
    def test_cone_relation_composes_to_zero(self, xy):
        # the image of (x^2-y^2, 2xy, x^2+y^2) satisfies s^2 + t^2 = u^2
        x, y = xy
        s, t, u = Polynomial.variables(3)
        relation = s**2 + t**2 - u**2
        assert relation.compose([x**2 - y**2, 2 * x * y, x**2 + y**2]).is_zero()

    def test_additive_identity(self, xy):
        x, y = xy
        p = 3 * x**2 - y + 7
        assert p + Polynomial.zero(2) == p

    def test_difference_of_squares(self, xy):
        x, y = xy
        product = (x + y) * (x - y)
        expected = Polynomial(2, {(2, 0): 1, (0, 2): -1})
        assert product == expected
        # independent check on a value grid
        for a in range(-3, 4):
            for b in range(-3, 4):
                assert product.eval([a, b]) == a * a - b * b

    def test_compose_identity(self, xy):
        x, y = xy
        p = x**3 - 2 * x * y + 5
        assert p.compose([x, y]) == p

    def test_compose_arity_error(self, xy):
        x, _ = xy
        with pytest.raises(ValueError):
            (x + 1).compose([x])


class TestNormalForm:
    def test_zero_input(self, xy):
        x, y = xy
        res = normal_form(-2 * x * y + 2 * x * y, [x**2 + y**2 - 1])
        assert res.remainder.is_zero()
        assert res.certainty == "certain-member"

    def test_direct_multiple(self, xy):
        x, y = xy
        g = x**2 + y**2 - 1
        res = normal_form(2 * g, [g])
        assert res.remainder.is_zero()
        assert res.is_member is True

    def test_constant_nonmember(self, xy):
        _, y = xy
        res = normal_form(Polynomial.constant(2, 1), [y])
        assert res.remainder == Polynomial.constant(2, 1)
        assert res.certainty == "certain-nonmember"
        assert res.is_member is False

    def test_inconclusive_without_groebner(self, xy):
        x, y = xy
        # two non-monomial generators: the syntactic Groebner check refuses
        gens = [x**2 + y, x * y + 1]
        res = normal_form(Polynomial.constant(2, 1) + x, gens)
        if not res.remainder.is_zero():
            assert res.certainty == "inconclusive"
            assert res.is_member is None

    def test_assume_groebner_override(self, xy):
        x, y = xy
        gens = [x**2 + y, x * y + 1]
        res = normal_form(x**3, gens, assume_groebner=True)
        if not res.remainder.is_zero():
            assert res.certainty == "certain-nonmember"

    @given(polynomials_st(), polynomials_st())
    @settings(max_examples=60, deadline=None)
    def test_combinations_always_members(self, a, b):
        # leading terms x^2 and y^3 are coprime, so {g, h} is a Groebner basis
        # and division must certify membership of every combination
        x, y = Polynomial.variables(2)
        g = x**2 + y**2 - 1
        h = y**3 - 2 * y + 1
        res = normal_form(a * g + b * h, [g, h], assume_groebner=True)
        assert res.remainder.is_zero()

    @given(polynomials_st(), polynomials_st())
    @settings(max_examples=60, deadline=None)
    def test_combinations_monomial_ideal(self, a, b):
        x, y = Polynomial.variables(2)
        g = x * y
        h = y**2
        res = normal_form(a * g + b * h, [g, h])
        assert res.remainder.is_zero()


class TestJacobian:
    def test_symbolic_derivative(self, xy):
        x, y = xy
        p = x**2 * y - x * y**2
        row = jacobian([p])[0]
        assert row[0] == 2 * x * y - y**2
        assert row[1] == x**2 - 2 * x * y
        # finite-difference oracle at a generic float point
        h = 1e-6
        for j, entry in enumerate(row):
            pt = [0.7, -1.3]
            up = pt[:]
            dn = pt[:]
            up[j] += h
            dn[j] -= h
            fd = (p.eval(up) - p.eval(dn)) / (2 * h)
            assert entry.eval(pt) == pytest.approx(fd, abs=1e-5)

    def test_constant_row(self):
        c = Polynomial.constant(3, Fraction(5, 2))
        assert all(e.is_zero() for e in jacobian([c])[0])

    def test_axes_jacobian_vanishes_at_origin(self, xyz):
        x, y, z = xyz
        jac = jacobian([x * y, y * z, z * x])
        assert all(entry.eval([0, 0, 0]) == 0 for row in jac for entry in row)

    @given(polynomials_st(), polynomials_st())
    @settings(max_examples=60, deadline=None)
    def test_leibniz(self, p, q):
        for j in range(2):
            lhs = (p * q).diff(j)
            rhs = p * q.diff(j) + q * p.diff(j)
            assert lhs == rhs


class TestRingAxioms:
    @given(polynomials_st(), polynomials_st(), polynomials_st())
    @settings(max_examples=60, deadline=None)
    def test_associativity_and_distributivity(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    @given(polynomials_st(), polynomials_st())
    @settings(max_examples=60, deadline=None)
    def test_commutativity(self, a, b):
        assert a + b == b + a
        assert a * b == b * a

    @given(polynomials_st(), polynomials_st(), polynomials_st(), points_st())
    @settings(max_examples=60, deadline=None)
    def test_eval_of_compose(self, p, q1, q2, pt):
        composed = p.compose([q1, q2])
        assert composed.eval(pt) == p.eval([q1.eval(pt), q2.eval(pt)])


class TestParsing:
    def test_round_trip_canonical(self):
        text = "x^2*y - 2*x + 1/3"
        p = parse_polynomial(text, ["x", "y"])
        assert p.to_string(["x", "y"]) == text
        assert parse_polynomial(p.to_string(["x", "y"]), ["x", "y"]) == p

    def test_rationals_and_parens(self):
        p = parse_polynomial("(x + 1/2)*(x - 1/2)", ["x"])
        assert p == Polynomial(1, {(2,): 1, (0,): Fraction(-1, 4)})

    def test_unknown_variable(self):
        with pytest.raises(ParseError) as err:
            parse_polynomial("x + z", ["x", "y"])
        assert "unknown variable" in str(err.value)

    def test_position_reported(self):
        with pytest.raises(ParseError) as err:
            parse_polynomial("x + $", ["x"])
        assert err.value.line == 1
        assert err.value.column == 5

    def test_non_polynomial_rejected(self):
        with pytest.raises(ParseError):
            parse_polynomial("1/x", ["x"])

    def test_rational_function(self):
        rf = parse_rational_function("1/(4*u)", ["s", "t", "u"])
        assert rf.num == Polynomial.constant(3, Fraction(1, 4))
        assert rf.den == Polynomial.variable(3, 2)

    def test_power_binding(self):
        p = parse_polynomial("-x^2", ["x"])
        assert p == Polynomial(1, {(2,): -1})

    def test_whitespace_insensitive(self):
        a = parse_polynomial("x ^2+ y*  x", ["x", "y"])
        b = parse_polynomial("x^2+y*x", ["x", "y"])
        assert a == b


class TestGcdAndRationalFunctions:
    def test_common_factor(self, xy):
        x, y = xy
        g = poly_gcd((x + y) * (x - y), (x + y) * x)
        assert g == x + y

    def test_coprime(self, xy):
        x, y = xy
        assert poly_gcd(x + 1, y + 1) == Polynomial.constant(2, 1)

    def test_divides_exactly(self, xy):
        x, y = xy
        q = divides_exactly(x + y, (x + y) * (x - y + 3))
        assert q == x - y + 3
        assert divides_exactly(x + y, x * y + 1) is None

    def test_reduction_cancels(self, xy):
        x, y = xy
        r = RationalFunction((x**2 + y**2) * (x - y), x**2 + y**2)
        assert r.is_polynomial()
        assert r.as_polynomial() == x - y

    def test_cone_coefficient_arithmetic(self):
        vs = ["s", "t", "u"]
        quarter_u = parse_rational_function("1/(4*u)", vs)
        u = Polynomial.variable(3, 2)
        assert quarter_u * (4 * u) == RationalFunction.constant(3, 1)

    def test_zero_denominator_rejected(self, xy):
        x, _ = xy
        with pytest.raises(ZeroDivisionError):
            RationalFunction(x, Polynomial.zero(2))

    @given(polynomials_st(max_degree=2, max_terms=3), polynomials_st(max_degree=2, max_terms=3))
    @settings(max_examples=40, deadline=None)
    def test_field_axioms(self, p, q):
        if q.is_zero():
            return
        a = RationalFunction(p, q)
        assert a - a == RationalFunction.zero(2)
        if not p.is_zero():
            assert a / a == RationalFunction.constant(2, 1)

    @given(polynomials_st(max_degree=2, max_terms=3), polynomials_st(max_degree=2, max_terms=3))
    @settings(max_examples=40, deadline=None)
    def test_gcd_divides_both(self, p, q):
        if p.is_zero() or q.is_zero():
            return
        g = poly_gcd(p, q)
        assert divides_exactly(g, p) is not None
        assert divides_exactly(g, q) is not None


class TestCanonicalPrinting:
    def test_descending_grlex(self, xy):
        x, y = xy
        p = 1 + x + y**3 + x * y
        # grlex: y^3 (deg 3) then x*y (deg 2) then x then 1
        assert p.to_string(["x", "y"]) == "y^3 + x*y + x + 1"

    def test_leading_negative(self, xy):
        x, y = xy
        assert (-x + y).to_string(["x", "y"]) == "-x + y"

    def test_fraction_coefficients(self, xy):
        x, _ = xy
        assert (x * Fraction(-3, 2)).to_string(["x", "y"]) == "-3/2*x"
