"""Symplectic structure, momentum maps, Poisson brackets, Sjamaar pairs."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from stratlab.actions import FiniteGroupAction, HilbertMap, TorusAction
from stratlab.diffspace import GT, SpaceDef, StratumParam, zariski_tangent
from stratlab.fields import flow
from stratlab.forms import DifferentialForm, exterior_d, interior_product
from stratlab.hamiltonian import (
    SymplecticForm,
    check_sjamaar,
    derive_momentum_map,
    hamiltonian_vector_field,
    poisson_bracket,
    reduced_strata,
    zero_level,
)
from stratlab.polyalg import Polynomial, parse_rational_function

from conftest import polynomials_st


def omega2():
    return SymplecticForm.standard(2)


def omega4():
    return SymplecticForm.standard(4)


def rotation_action():
    return TorusAction(2, [(0, 1)], [[1]])


def opposite_weights():
    return TorusAction(4, [(0, 1), (2, 3)], [[1, -1]])


class TestSymplecticForm:
    def test_standard_matrix(self):
        w = omega2()
        assert w.matrix[0][1] == 1 and w.matrix[1][0] == -1

    def test_non_antisymmetric_rejected(self):
        with pytest.raises(ValueError):
            SymplecticForm([[0, 1], [1, 0]])

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            SymplecticForm([[0, 0], [0, 0]])

    def test_closedness_automatic(self):
        assert exterior_d(omega4().as_form()).is_zero()


class TestHamiltonianVectorField:
    def test_quadratic_gives_rotation(self):
        x, y = Polynomial.variables(2)
        xf = hamiltonian_vector_field(omega2(), (x**2 + y**2) * Fraction(1, 2))
        assert xf.components == [-y, x]

    def test_constant_gives_zero(self):
        xf = hamiltonian_vector_field(omega2(), Polynomial.constant(2, 7))
        assert all(c.is_zero() for c in xf.components)

    def test_coordinate_hamiltonian(self):
        x, _ = Polynomial.variables(2)
        xf = hamiltonian_vector_field(omega2(), x)
        assert xf.components == [Polynomial.zero(2), Polynomial.constant(2, 1)]

    def test_defining_identity(self):
        # X_f contracted into omega equals -df, verified symbolically
        x, y = Polynomial.variables(2)
        for f in (x * y, x**3 - y, (x**2 + y**2) * Fraction(1, 2)):
            xf = hamiltonian_vector_field(omega2(), f)
            lhs = interior_product(xf, omega2().as_form())
            rhs = exterior_d(DifferentialForm.from_function(f)) * (-1)
            assert lhs == rhs

    @given(polynomials_st(max_degree=2, max_terms=3), polynomials_st(max_degree=2, max_terms=3))
    @settings(max_examples=30, deadline=None)
    def test_linearity(self, f, g):
        w = omega2()
        lhs = hamiltonian_vector_field(w, 2 * f + 3 * g)
        rhs_f = hamiltonian_vector_field(w, f)
        rhs_g = hamiltonian_vector_field(w, g)
        assert lhs.components == [
            2 * a + 3 * b for a, b in zip(rhs_f.components, rhs_g.components)
        ]


class TestMomentumMap:
    def test_weight_one(self):
        phi = derive_momentum_map(rotation_action(), omega2())
        x, y = Polynomial.variables(2)
        assert phi.components[0] == (x**2 + y**2) * Fraction(1, 2)
        assert phi.verify()

    def test_opposite_weights(self):
        phi = derive_momentum_map(opposite_weights(), omega4())
        v = Polynomial.variables(4)
        expected = (v[0] ** 2 + v[1] ** 2 - v[2] ** 2 - v[3] ** 2) * Fraction(1, 2)
        assert phi.components[0] == expected
        assert phi.verify()

    def test_finite_group_zero_map(self):
        phi = derive_momentum_map(FiniteGroupAction.minus_identity(2), omega2())
        assert phi.components == []
        assert phi.verify()

    def test_normalized_at_origin(self):
        phi = derive_momentum_map(opposite_weights(), omega4())
        assert phi.apply((0, 0, 0, 0)) == (0,)

    def test_identity_per_generator(self):
        # xi_M . omega + d phi = 0 exactly, for each torus factor
        act = TorusAction(4, [(0, 1), (2, 3)], [[1, 0], [0, 2]])
        phi = derive_momentum_map(act, omega4())
        from stratlab.actions import infinitesimal_generators

        w = omega4().as_form()
        for xi, comp in zip(infinitesimal_generators(act), phi.components):
            lhs = interior_product(xi, w) + exterior_d(DifferentialForm.from_function(comp))
            assert lhs.is_zero()

    def test_invariance_under_commuting_flows(self):
        act = TorusAction(4, [(0, 1), (2, 3)], [[1, 0], [0, 2]])
        phi = derive_momentum_map(act, omega4())
        from stratlab.actions import infinitesimal_generators

        for xi in infinitesimal_generators(act):
            for comp in phi.components:
                assert xi.apply_to(comp).is_zero()


class TestZeroLevel:
    def test_cone_in_r4(self):
        phi = derive_momentum_map(opposite_weights(), omega4())
        z = zero_level(phi, ["x1", "y1", "x2", "y2"])
        assert zariski_tangent(z, (1, 0, 1, 0)).dim == 3
        assert z.contains((1, 0, 0, 1))
        assert not z.contains((1, 0, 0, 0))

    def test_weight_one_origin_only(self):
        phi = derive_momentum_map(rotation_action(), omega2())
        z = zero_level(phi, ["x", "y"])
        # sum-of-squares generator: the real zero set is the origin alone
        assert z.contains((0, 0))
        grid = [Fraction(a, 2) for a in range(-4, 5)]
        for a in grid:
            for b in grid:
                if (a, b) != (0, 0):
                    assert not z.contains((a, b))

    def test_trivial_map_full_space(self):
        phi = derive_momentum_map(FiniteGroupAction.minus_identity(2), omega2())
        z = zero_level(phi, ["x", "y"])
        assert not z.equations
        assert z.contains((17, -3))


class TestReducedStrata:
    def test_weight_one_origin_stratum(self):
        phi = derive_momentum_map(rotation_action(), omega2())
        z = zero_level(phi, ["x", "y"])
        rs = reduced_strata(rotation_action(), z)
        assert len(rs.stratification.strata) == 1
        assert rs.stratification.strata[0].dim == 0

    def test_opposite_weights_two_strata(self):
        act = opposite_weights()
        phi = derive_momentum_map(act, omega4())
        z = zero_level(phi, ["x1", "y1", "x2", "y2"])
        rs = reduced_strata(act, z)
        dims = sorted(s.dim for s in rs.stratification.strata)
        assert dims == [0, 3]
        stabs = sorted(s.stabilizer_descriptor.dim for s in rs.stratification.strata)
        assert stabs == [0, 1]  # trivial stabilizer off the apex, full circle at it

    def test_finite_case_matches_geometric(self):
        z2 = FiniteGroupAction.minus_identity(2)
        phi = derive_momentum_map(z2, omega2())
        z = zero_level(phi, ["x", "y"])
        x, y = Polynomial.variables(2)
        hm = HilbertMap([x**2 - y**2, 2 * x * y, x**2 + y**2], target_names=["s", "t", "u"])
        rs = reduced_strata(z2, z, hm)
        dims = sorted(s.dim for s in rs.stratification.strata)
        assert dims == [0, 2]
        # quotient-side labels through the Hilbert map
        assert sorted(rs.quotient_points.values()) == sorted(
            [(0, 0, 0), hm.apply(rs.stratification.principal().sample)]
        )


class TestPoissonBracket:
    def test_canonical_pair(self):
        x, y = Polynomial.variables(2)
        assert poisson_bracket(omega2(), x, y) == 1

    def test_antisymmetry_diagonal(self):
        x, y = Polynomial.variables(2)
        f = x**2 * y - y
        assert poisson_bracket(omega2(), f, f).is_zero()

    def test_quadratic_bracket(self):
        x, y = Polynomial.variables(2)
        assert poisson_bracket(omega2(), x**2 * Fraction(1, 2), y) == x

    @given(
        polynomials_st(max_degree=2, max_terms=3),
        polynomials_st(max_degree=2, max_terms=3),
        polynomials_st(max_degree=2, max_terms=3),
    )
    @settings(max_examples=40, deadline=None)
    def test_axioms(self, f, g, h):
        w = omega2()
        assert poisson_bracket(w, f, g) == poisson_bracket(w, g, f) * (-1)
        # Leibniz in the second slot
        assert poisson_bracket(w, f, g * h) == h * poisson_bracket(w, f, g) + g * poisson_bracket(w, f, h)

    @given(
        polynomials_st(max_degree=2, max_terms=2),
        polynomials_st(max_degree=2, max_terms=2),
        polynomials_st(max_degree=2, max_terms=2),
    )
    @settings(max_examples=25, deadline=None)
    def test_jacobi(self, f, g, h):
        w = omega2()
        total = (
            poisson_bracket(w, f, poisson_bracket(w, g, h))
            + poisson_bracket(w, g, poisson_bracket(w, h, f))
            + poisson_bracket(w, h, poisson_bracket(w, f, g))
        )
        assert total.is_zero()


class TestHamiltonianTangency:
    def test_fields_tangent_to_levels(self):
        act = opposite_weights()
        phi = derive_momentum_map(act, omega4())
        v = Polynomial.variables(4)
        invariants = [
            phi.components[0],
            (v[0] ** 2 + v[1] ** 2),
            (v[2] ** 2 + v[3] ** 2),
            (v[0] ** 2 + v[1] ** 2) * (v[2] ** 2 + v[3] ** 2),
        ]
        for f in invariants:
            xf = hamiltonian_vector_field(omega4(), f)
            for comp in phi.components:
                assert xf.apply_to(comp).is_zero()

    def test_flow_preserves_symplectic_form(self):
        # numeric Jacobian of the flow map must satisfy J^T Omega J = Omega
        x, y = Polynomial.variables(2)
        f = (x**2 + y**2) * Fraction(1, 2) + x**3 * Fraction(1, 5)
        xf = hamiltonian_vector_field(omega2(), f)
        space = SpaceDef(2, ["x", "y"], name="plane")
        t = 0.7
        base = np.array([0.4, -0.3])
        h = 1e-5
        cols = []
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            plus = flow(space, xf, base + e, t).end_point
            minus = flow(space, xf, base - e, t).end_point
            cols.append([(a - b) / (2 * h) for a, b in zip(plus, minus)])
        jac = np.array(cols).T
        omega_num = np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert np.allclose(jac.T @ omega_num @ jac, omega_num, atol=1e-6)


def cone_setup():
    x, y = Polynomial.variables(2)
    hm = HilbertMap(
        [x**2 - y**2, 2 * x * y, x**2 + y**2], target_names=["s", "t", "u"]
    )
    a, b = Polynomial.variables(2)
    principal = StratumParam(
        "principal",
        2,
        [Polynomial.variable(2, 0), Polynomial.variable(2, 1)],
        open_constraints=[(a**2 + b**2, GT)],
    )
    return hm, principal


class TestSjamaar:
    def test_cone_pair_verified(self):
        hm, principal = cone_setup()
        sigma = DifferentialForm(
            3, 2, {(0, 1): parse_rational_function("1/(4*u)", ["s", "t", "u"])}
        )
        alpha = DifferentialForm(2, 2, {(0, 1): 1})
        verdict = check_sjamaar(FiniteGroupAction.minus_identity(2), hm, principal, sigma, alpha)
        assert verdict.ok

    def test_zero_pair_verified(self):
        hm, principal = cone_setup()
        sigma = DifferentialForm.zero(3, 1)
        alpha = DifferentialForm.zero(2, 1)
        verdict = check_sjamaar(FiniteGroupAction.minus_identity(2), hm, principal, sigma, alpha)
        assert verdict.verified

    def test_mismatched_pair_rejected(self):
        hm, principal = cone_setup()
        sigma = DifferentialForm(3, 1, {(0,): 1})  # ds
        alpha = DifferentialForm(2, 1, {(0,): 1})  # dx
        verdict = check_sjamaar(FiniteGroupAction.minus_identity(2), hm, principal, sigma, alpha)
        assert not verdict.verified
        # ds pulls back to 2x dx - 2y dy, which is not dx (and dx is not invariant)
        assert not verdict.invariant

    def test_denominator_vanishing_rejected(self):
        hm, principal = cone_setup()
        # 1/s blows up on the substratum s = 0; on the full parametrization the
        # composition s = a^2 - b^2 is not identically zero, so this passes the
        # symbolic check; but 1/(s^2+t^2-u^2) vanishes identically on the image
        bad = DifferentialForm(
            3, 2, {(0, 1): parse_rational_function("1/(s^2 + t^2 - u^2 + 0)", ["s", "t", "u"])}
        )
        alpha = DifferentialForm(2, 2, {(0, 1): 1})
        with pytest.raises(ZeroDivisionError):
            check_sjamaar(FiniteGroupAction.minus_identity(2), hm, principal, bad, alpha)
