"""Group actions: stabilizers, stratifications, invariants, embeddings."""

from fractions import Fraction

import pytest

from stratlab.actions import (
    FiniteGroupAction,
    HilbertMap,
    TorusAction,
    conjugacy_classes_of_subgroups,
    enumerate_subgroups,
    fixed_subspace,
    hilbert_embed,
    infinitesimal_generators,
    orbit_type_partition,
    reynolds_average,
    stabilizer,
    verify_invariant_gens,
)
from stratlab.diffspace import SpaceDef
from stratlab.polyalg import Polynomial, parse_polynomial


def plane():
    return SpaceDef(2, ["x", "y"], name="plane")


def z2():
    return FiniteGroupAction.minus_identity(2)


def z2_squared():
    return FiniteGroupAction.sign_flips(2)


def circle_rotation():
    return TorusAction(2, [(0, 1)], [[1]])


class TestGroupConstruction:
    def test_closure_computed(self):
        g = z2_squared()
        assert g.order == 4

    def test_non_orthogonal_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroupAction(2, [[[1, 1], [0, 1]]])

    def test_rotation_by_quarter_turn(self):
        g = FiniteGroupAction(2, [[[0, -1], [1, 0]]])
        assert g.order == 4

    def test_torus_plane_overlap_rejected(self):
        with pytest.raises(ValueError):
            TorusAction(3, [(0, 1), (1, 2)], [[1, 1]])


class TestStabilizer:
    def test_origin_fixed_by_everything(self):
        st = stabilizer(z2(), (Fraction(0), Fraction(0)))
        assert st.order == 2

    def test_generic_point_trivial(self):
        st = stabilizer(z2(), (Fraction(1), Fraction(0)))
        assert st.order == 1

    def test_sign_flip_axis_point(self):
        st = stabilizer(z2_squared(), (Fraction(0), Fraction(3)))
        assert st.order == 2
        # the nontrivial element flips the first coordinate only
        flips = [g for g in st.elements if g[0][0] == -1]
        assert len(flips) == 1 and flips[0][1][1] == 1

    def test_torus_stabilizers(self):
        act = circle_rotation()
        full = stabilizer(act, (Fraction(0), Fraction(0)))
        assert full.dim == 1 and full.is_full
        generic = stabilizer(act, (Fraction(1), Fraction(0)))
        assert generic.dim == 0 and generic.finite_order == 1

    def test_weighted_cyclic_stabilizer(self):
        act = TorusAction(4, [(0, 1), (2, 3)], [[2, 3]])
        st = stabilizer(act, (Fraction(1), Fraction(0), Fraction(0), Fraction(0)))
        assert st.dim == 0 and st.finite_order == 2


class TestSubgroupMachinery:
    def test_subgroup_count_z2_squared(self):
        # {e}, three order-2 subgroups, the full group
        assert len(enumerate_subgroups(z2_squared())) == 5

    def test_conjugacy_trivial_for_abelian(self):
        classes = conjugacy_classes_of_subgroups(z2_squared())
        assert all(len(cls) == 1 for cls in classes)

    def test_fix_monotone_under_inclusion(self):
        g = z2_squared()
        subs = enumerate_subgroups(g)
        from stratlab import rlinalg

        for h1 in subs:
            for h2 in subs:
                if set(h1) <= set(h2):
                    f1 = fixed_subspace(g, h1)
                    f2 = fixed_subspace(g, h2)
                    rows1 = [list(v) for v in f1]
                    # Fix(h2) must be inside Fix(h1)
                    for v in f2:
                        assert rlinalg.rank(rows1 + [list(v)]) == rlinalg.rank(rows1)


class TestOrbitTypePartition:
    def test_z2_two_sets(self):
        strat = orbit_type_partition(z2(), plane())
        dims = sorted(s.dim for s in strat.strata)
        assert dims == [0, 2]
        principal = strat.principal()
        assert len(principal.stabilizer_descriptor.elements) == 1
        # removing the origin (codimension 2) leaves the plane connected
        assert principal.components == [()]

    def test_z2_squared_partition(self):
        strat = orbit_type_partition(z2_squared(), plane())
        dims = sorted(s.dim for s in strat.strata)
        assert dims == [0, 1, 1, 2]
        principal = strat.principal()
        assert len(principal.components) == 4  # the open quadrants
        axes = [s for s in strat.strata if s.dim == 1]
        assert all(len(s.components) == 2 for s in axes)  # punctured axes split

    def test_circle_rotation_partition(self):
        strat = orbit_type_partition(circle_rotation(), plane())
        dims = sorted(s.dim for s in strat.strata)
        assert dims == [0, 2]
        by_dim = {s.dim: s for s in strat.strata}
        assert by_dim[0].stabilizer_descriptor.is_full
        assert by_dim[2].stabilizer_descriptor.dim == 0

    def test_each_sample_in_exactly_one_set(self):
        strat = orbit_type_partition(z2_squared(), plane())
        samples = [
            (Fraction(0), Fraction(0)),
            (Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(-2)),
            (Fraction(3), Fraction(4)),
        ]
        for x in samples:
            stab = frozenset(stabilizer(z2_squared(), x).elements)
            owners = [
                s
                for s in strat.strata
                if frozenset(s.stabilizer_descriptor.elements) == stab
            ]
            assert len(owners) == 1

    def test_principal_set_open_dense(self):
        for action in (z2(), z2_squared()):
            strat = orbit_type_partition(action, plane())
            principal = strat.principal()
            assert principal.dim == 2
            assert all(s.dim < 2 for s in strat.strata if s is not principal)

    def test_closure_order_consistent_with_samples(self):
        strat = orbit_type_partition(z2_squared(), plane())
        for low_label, high_label in strat.closure_order:
            low = strat.by_label(low_label)
            high = strat.by_label(high_label)
            assert low.dim < high.dim
            # a sample of the lower stratum is a limit of points built from
            # the higher stratum's span
            assert low.sample is not None

    def test_non_invariant_space_rejected(self):
        x, y = Polynomial.variables(2)
        shifted = SpaceDef(2, ["x", "y"], equations=[y - 1], name="line")
        with pytest.raises(ValueError):
            orbit_type_partition(z2(), shifted)

    def test_invariant_curved_space(self):
        x, y = Polynomial.variables(2)
        circle = SpaceDef(
            2, ["x", "y"], equations=[x**2 + y**2 - 1], sample_points=[(1, 0), (0, 1), (-1, 0)]
        )
        strat = orbit_type_partition(z2(), circle)
        assert [s.dim for s in strat.strata] == [1]


class TestInvariantGenerators:
    def test_cone_generators_invariant(self):
        x, y = Polynomial.variables(2)
        verdict = verify_invariant_gens(z2(), [x**2 - y**2, 2 * x * y, x**2 + y**2])
        assert verdict.all_invariant

    def test_squares_invariant_under_sign_flips(self):
        n = 4
        group = FiniteGroupAction.sign_flips(n)
        gens = [Polynomial.variable(n, i) ** 2 for i in range(n)]
        assert verify_invariant_gens(group, gens).all_invariant

    def test_coordinate_not_invariant(self):
        x, _ = Polynomial.variables(2)
        verdict = verify_invariant_gens(z2(), [x])
        assert not verdict.all_invariant
        assert verdict.per_generator[0][1] is False

    def test_torus_invariance_via_lie_derivative(self):
        x, y = Polynomial.variables(2)
        verdict = verify_invariant_gens(circle_rotation(), [x**2 + y**2, x])
        assert verdict.per_generator[0][1] is True
        assert verdict.per_generator[1][1] is False

    def test_reynolds_average_is_invariant(self):
        x, y = Polynomial.variables(2)
        p = x**3 + x * y + y**2
        avg = reynolds_average(z2(), p)
        assert verify_invariant_gens(z2(), [avg]).all_invariant


def cone_hilbert_map():
    x, y = Polynomial.variables(2)
    return HilbertMap(
        [x**2 - y**2, 2 * x * y, x**2 + y**2],
        target_names=["s", "t", "u"],
        relations=[parse_polynomial("s^2 + t^2 - u^2", ["s", "t", "u"])],
    )


class TestHilbertEmbed:
    def test_cone_image_point(self):
        hm = cone_hilbert_map()
        assert hm.apply((Fraction(1), Fraction(1))) == (0, 2, 2)

    def test_relation_composes_to_zero(self):
        hm = cone_hilbert_map()
        assert hm.relations[0].compose(hm.generators).is_zero()

    def test_bad_relation_rejected(self):
        x, y = Polynomial.variables(2)
        with pytest.raises(ValueError):
            HilbertMap(
                [x**2 - y**2, 2 * x * y, x**2 + y**2],
                target_names=["s", "t", "u"],
                relations=[parse_polynomial("s + t", ["s", "t", "u"])],
            )

    def test_separation_verified_on_samples(self):
        hm = cone_hilbert_map()
        samples = [
            (Fraction(1), Fraction(1)),
            (Fraction(-1), Fraction(-1)),
            (Fraction(1), Fraction(-1)),
            (Fraction(2), Fraction(0)),
            (Fraction(0), Fraction(2)),
            (Fraction(1, 2), Fraction(1, 3)),
        ]
        report = hilbert_embed(z2(), hm, samples)
        assert report.ok
        assert report.separation == "verified"
        assert report.relations_hold

    def test_separation_failure_witnessed(self):
        # x^2 alone does not separate (1, 2) from (1, -2)
        x, y = Polynomial.variables(2)
        hm = HilbertMap([x**2], target_names=["s"])
        report = hilbert_embed(z2(), hm, [(Fraction(1), Fraction(2)), (Fraction(1), Fraction(-2))])
        assert report.separation == "failed"
        assert report.separation_witness is not None

    def test_orthant_images(self):
        n = 3
        group = FiniteGroupAction.sign_flips(n)
        hm = HilbertMap([Polynomial.variable(n, i) ** 2 for i in range(n)])
        samples = [
            (Fraction(1), Fraction(-2), Fraction(3)),
            (Fraction(-5), Fraction(7), Fraction(-1, 2)),
        ]
        report = hilbert_embed(group, hm, samples)
        assert all(all(c >= 0 for c in img) for img in report.images)

    def test_identity_group_identity_embedding(self):
        n = 2
        ident = FiniteGroupAction(n, [[[1, 0], [0, 1]]])
        hm = HilbertMap([Polynomial.variable(n, i) for i in range(n)])
        samples = [(Fraction(1), Fraction(2)), (Fraction(-1), Fraction(0))]
        report = hilbert_embed(ident, hm, samples)
        assert report.images == [s for s in samples]
        assert report.separation == "verified"

    def test_non_invariant_generators_rejected(self):
        x, y = Polynomial.variables(2)
        hm = HilbertMap([x])
        with pytest.raises(ValueError):
            hilbert_embed(z2(), hm, [(Fraction(1), Fraction(0))])


class TestInfinitesimalGenerators:
    def test_weight_one_rotation(self):
        fields = infinitesimal_generators(circle_rotation())
        assert len(fields) == 1
        x, y = Polynomial.variables(2)
        assert fields[0].components == [-y, x]
        # derivative-of-rotation oracle: d/dt [cos t, -sin t; sin t, cos t] x at 0
        import math

        eps = 1e-7
        for pt in [(1.0, 0.0), (0.3, -2.0)]:
            ct, st = math.cos(eps), math.sin(eps)
            moved = (ct * pt[0] - st * pt[1], st * pt[0] + ct * pt[1])
            fd = tuple((m - p) / eps for m, p in zip(moved, pt))
            val = fields[0].value_at(pt)
            assert abs(fd[0] - val[0]) < 1e-5 and abs(fd[1] - val[1]) < 1e-5

    def test_opposite_weights(self):
        act = TorusAction(4, [(0, 1), (2, 3)], [[1, -1]])
        (xi,) = infinitesimal_generators(act)
        v = Polynomial.variables(4)
        assert xi.components == [-v[1], v[0], v[3], -v[2]]

    def test_finite_group_empty(self):
        assert infinitesimal_generators(z2()) == []


class TestNonabelianPartition:
    def test_square_symmetries(self):
        # rotation by a quarter turn plus the x-axis reflection generate the
        # 8-element symmetry group of the square, with conjugate reflections
        d4 = FiniteGroupAction(2, [[[0, -1], [1, 0]], [[1, 0], [0, -1]]])
        assert d4.order == 8
        classes = conjugacy_classes_of_subgroups(d4)
        assert sorted(len(c) for c in classes) == [1, 1, 1, 1, 1, 1, 2, 2]
        strat = orbit_type_partition(d4, plane())
        by_dim = {}
        for s in strat.strata:
            by_dim.setdefault(s.dim, []).append(s)
        assert sorted(by_dim) == [0, 1, 2]
        # plane minus the four mirror lines: eight chambers
        assert len(by_dim[2][0].components) == 8
        # each reflection class contributes four punctured rays (two per member)
        assert [len(s.components) for s in by_dim[1]] == [4, 4]
        assert len(by_dim[0][0].stabilizer_descriptor.elements) == 8

    def test_rotation_group_c4(self):
        c4 = FiniteGroupAction(2, [[[0, -1], [1, 0]]])
        strat = orbit_type_partition(c4, plane())
        dims = sorted(s.dim for s in strat.strata)
        assert dims == [0, 2]
        # no reflections: the punctured plane stays in one piece
        assert len(strat.principal().components) == 1
