"""Linear group actions: finite orthogonal groups and torus weight actions.

Covers stabilizers, orbit-type partitions with exact dimensions, invariance
verification for polynomial generators, Hilbert-map quotient embeddings with
orbit-separation checks, and infinitesimal generators of torus actions.

Finite groups are given by rational orthogonal generator matrices; the full
element list is computed by closure (capped at 10^4 elements).  Torus
actions are given by integer weights on disjoint coordinate 2-planes.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from . import rlinalg
from .diffspace import SpaceDef
from .fields import Derivation
from .polyalg import Polynomial, normal_form

__all__ = [
    "FiniteGroupAction",
    "TorusAction",
    "HilbertMap",
    "Stratification",
    "OrbitTypeStratum",
    "stabilizer",
    "orbit_type_partition",
    "verify_invariant_gens",
    "hilbert_embed",
    "infinitesimal_generators",
    "reynolds_average",
]

CLOSURE_CAP = 10_000


# -- matrices over Q ------------------------------------------------------------


def _mat(rows):
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _mat_vec(m, x):
    return tuple(sum(m[i][j] * x[j] for j in range(len(x))) for i in range(len(m)))


def _identity(n):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def _transpose(m):
    return tuple(tuple(m[j][i] for j in range(len(m))) for i in range(len(m[0])))


def _is_orthogonal(m) -> bool:
    return _mat_mul(_transpose(m), m) == _identity(len(m))


def _mat_inv_orthogonal(m):
    return _transpose(m)


class FiniteGroupAction:
    """A finite subgroup of O_n(Q), stored as its full element list."""

    kind = "finite"

    def __init__(self, nvars: int, generators):
        self.nvars = nvars
        gens = [_mat(g) for g in generators]
        for g in gens:
            if len(g) != nvars or any(len(row) != nvars for row in g):
                raise ValueError("generator matrix has wrong shape")
            if not _is_orthogonal(g):
                raise ValueError("generator matrix is not orthogonal")
        self.generators = gens
        self.elements = self._closure(gens)

    def _closure(self, gens):
        ident = _identity(self.nvars)
        elements = {ident}
        frontier = [ident]
        while frontier:
            m = frontier.pop()
            for g in self.generators:
                prod = _mat_mul(m, g)
                if prod not in elements:
                    if len(elements) >= CLOSURE_CAP:
                        raise ValueError(
                            f"group closure exceeded {CLOSURE_CAP} elements"
                        )
                    elements.add(prod)
                    frontier.append(prod)
        return sorted(elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def act(self, g, x):
        return _mat_vec(g, x)

    def element_polymap(self, g):
        """The linear substitution x -> g x as a list of polynomials."""
        return [
            sum(
                (Polynomial.variable(self.nvars, j) * g[i][j] for j in range(self.nvars)),
                Polynomial.zero(self.nvars),
            )
            for i in range(self.nvars)
        ]

    def __repr__(self):
        return f"FiniteGroupAction(order={self.order}, nvars={self.nvars})"

    @classmethod
    def sign_flips(cls, nvars: int):
        """The full coordinate sign-flip group {+-1}^n."""
        gens = []
        for i in range(nvars):
            m = [[1 if a == b else 0 for b in range(nvars)] for a in range(nvars)]
            m[i][i] = -1
            gens.append(m)
        return cls(nvars, gens)

    @classmethod
    def minus_identity(cls, nvars: int):
        return cls(nvars, [[[-1 if a == b else 0 for b in range(nvars)] for a in range(nvars)]])


class TorusAction:
    """A torus T^r acting by integer weights on disjoint coordinate 2-planes.

    planes   list of coordinate index pairs (i, j), pairwise disjoint
    weights  one integer row per torus factor, one column per plane
    """

    kind = "torus"

    def __init__(self, nvars: int, planes, weights):
        self.nvars = nvars
        self.planes = [tuple(p) for p in planes]
        used = set()
        for i, j in self.planes:
            if not (0 <= i < nvars and 0 <= j < nvars) or i == j:
                raise ValueError(f"bad plane ({i}, {j})")
            if i in used or j in used:
                raise ValueError("weight planes must be pairwise disjoint")
            used.update((i, j))
        self.weights = [list(int(w) for w in row) for row in weights]
        for row in self.weights:
            if len(row) != len(self.planes):
                raise ValueError("weight row length must match number of planes")
        self.rank = len(self.weights)

    def plane_component(self, x, p: int):
        i, j = self.planes[p]
        return (x[i], x[j])

    def __repr__(self):
        return f"TorusAction(rank={self.rank}, planes={self.planes}, weights={self.weights})"


# -- stabilizers -------------------------------------------------------------------


@dataclass
class FiniteStabilizer:
    elements: list

    @property
    def order(self):
        return len(self.elements)


@dataclass
class TorusStabilizer:
    dim: int
    active_planes: list
    finite_order: Optional[int]  # only computed for rank-1 tori

    @property
    def is_full(self):
        return not self.active_planes


def stabilizer(action, x):
    """Exact stabilizer of a point.

    Finite actions return the element list; torus actions return the
    subtorus dimension determined by which weight planes of x are nonzero
    (with the cyclic order filled in for rank-1 tori).
    """
    if action.kind == "finite":
        xs = tuple(Fraction(v) for v in x)
        return FiniteStabilizer([g for g in action.elements if _mat_vec(g, xs) == xs])
    active = []
    for p in range(len(action.planes)):
        a, b = action.plane_component(x, p)
        if a != 0 or b != 0:
            active.append(p)
    rows = [[row[p] for p in active] for row in action.weights]
    r = rlinalg.rank(rows) if active else 0
    dim = action.rank - r
    finite_order = None
    if action.rank == 1 and dim == 0:
        g = 0
        for p in active:
            g = gcd(g, abs(action.weights[0][p]))
        finite_order = g
    return TorusStabilizer(dim=dim, active_planes=active, finite_order=finite_order)


# -- subgroup and conjugacy machinery (finite) --------------------------------------


def _subgroup_closure(action, seed):
    elements = set(seed)
    frontier = list(seed)
    while frontier:
        m = frontier.pop()
        for g in list(elements):
            for prod in (_mat_mul(m, g), _mat_mul(g, m)):
                if prod not in elements:
                    elements.add(prod)
                    frontier.append(prod)
    return frozenset(elements)


def enumerate_subgroups(action: FiniteGroupAction):
    """All subgroups, found by extending known subgroups one generator at a time."""
    ident = _identity(action.nvars)
    trivial = frozenset({ident})
    subgroups = {trivial}
    frontier = [trivial]
    while frontier:
        h = frontier.pop()
        for g in action.elements:
            if g in h:
                continue
            k = _subgroup_closure(action, set(h) | {g})
            if k not in subgroups:
                subgroups.add(k)
                frontier.append(k)
    return sorted(subgroups, key=lambda s: (len(s), sorted(s)))


def _conjugate_subgroup(action, h, g):
    ginv = _mat_inv_orthogonal(g)
    return frozenset(_mat_mul(_mat_mul(g, m), ginv) for m in h)


def conjugacy_classes_of_subgroups(action: FiniteGroupAction):
    subgroups = enumerate_subgroups(action)
    seen = set()
    classes = []
    for h in subgroups:
        if h in seen:
            continue
        cls = {_conjugate_subgroup(action, h, g) for g in action.elements}
        seen.update(cls)
        classes.append(sorted(cls, key=lambda s: sorted(s)))
    return classes


def fixed_subspace(action, subgroup):
    """Exact rational basis of Fix(H) = {x : g x = x for all g in H}."""
    ident = _identity(action.nvars)
    rows = []
    for g in subgroup:
        if g == ident:
            continue
        for i in range(action.nvars):
            rows.append(
                [g[i][j] - (1 if i == j else 0) for j in range(action.nvars)]
            )
    if not rows:
        return [
            tuple(
                Fraction(1) if i == j else Fraction(0) for i in range(action.nvars)
            )
            for j in range(action.nvars)
        ]
    return rlinalg.nullspace(rows)


# -- orbit-type stratification --------------------------------------------------------


@dataclass
class OrbitTypeStratum:
    label: str
    stabilizer_descriptor: object
    dim: int
    fix_basis: list  # basis of the ambient linear span (finite case)
    components: Optional[list]  # sign-condition descriptors, or None
    components_note: str = ""
    sample: Optional[tuple] = None


@dataclass
class Stratification:
    strata: list
    closure_order: list  # (lower_label, upper_label) pairs

    def labels(self):
        return [s.label for s in self.strata]

    def by_label(self, label):
        for s in self.strata:
            if s.label == label:
                return s
        raise KeyError(label)

    def principal(self):
        return max(self.strata, key=lambda s: s.dim)

    def to_json(self) -> str:
        payload = {
            "strata": [
                {
                    "label": s.label,
                    "dim": s.dim,
                    "components": None
                    if s.components is None
                    else [list(map(str, c)) for c in s.components],
                    "note": s.components_note,
                }
                for s in self.strata
            ],
            "closure_order": [list(pair) for pair in self.closure_order],
        }
        return json.dumps(payload, sort_keys=True)


def _subspace_leq(basis_a, basis_b) -> bool:
    """Exact test span(basis_a) <= span(basis_b)."""
    if not basis_a:
        return True
    if not basis_b:
        return False
    rows_b = [list(v) for v in basis_b]
    rb = rlinalg.rank(rows_b)
    return rlinalg.rank(rows_b + [list(v) for v in basis_a]) == rb


def _hyperplane_functionals(fix_basis, removed_bases):
    """In Fix-coordinates, functionals of the removed hyperplanes.

    Returns (functionals, has_higher_codim): one functional per removed
    subspace of codimension 1 inside Fix; codimension >= 2 removals cannot
    disconnect and are only flagged.
    """
    d = len(fix_basis)
    functionals = []
    higher = False
    seen = set()
    for rb in removed_bases:
        # condition matrix C with C u = 0  <=>  sum u_j B_j lands in the removed subspace
        cmat = _membership_constraints(fix_basis, rb)
        codim = rlinalg.rank(cmat) if cmat else 0
        if codim == 0:
            return None, higher  # removed set covers Fix: stratum empty
        if codim == 1:
            echelon, pivots = rlinalg.bareiss_echelon(cmat)
            f = tuple(Fraction(c) for c in echelon[0])
            key = _normalize_functional(f)
            if key not in seen and tuple(-c for c in key) not in seen:
                seen.add(key)
                functionals.append(key)
        else:
            higher = True
    return functionals, higher


def _membership_constraints(fix_basis, removed_basis):
    """Matrix C with: sum_j u_j fix_basis[j] in span(removed_basis)  <=>  C u = 0."""
    n = len(fix_basis[0]) if fix_basis else 0
    # functionals annihilating the removed subspace: kernel of its basis rows
    if removed_basis:
        cokernel = rlinalg.nullspace([list(v) for v in removed_basis])
    else:
        cokernel = [
            tuple(Fraction(1) if i == j else Fraction(0) for i in range(n))
            for j in range(n)
        ]
    cmat = []
    for w in cokernel:
        cmat.append([sum(w[i] * b[i] for i in range(n)) for b in fix_basis])
    return cmat


def _normalize_functional(f):
    for c in f:
        if c != 0:
            scaled = tuple(x / abs(c) for x in f)
            return scaled if c > 0 else tuple(-x for x in scaled)
    return f


def _sign_components(functionals, dim):
    """Component descriptors of a linear space minus central hyperplanes.

    Returns (components, method).  Each component is a sign vector over the
    functionals; with <= 2 independent functionals the realizable sign
    vectors are determined exactly, beyond that by seeded rational sampling
    (method "sampled": complete with overwhelming probability, not certified).
    """
    k = len(functionals)
    if k == 0:
        return [()], "exact"
    if k == 1:
        return [(1,), (-1,)], "exact"
    if k == 2:
        rows = [list(f) for f in functionals]
        if rlinalg.rank(rows) == 2:
            return [(1, 1), (1, -1), (-1, 1), (-1, -1)], "exact"
        # dependent: f2 = c f1
        ratio = None
        for a, b in zip(*functionals):
            if a != 0:
                ratio = b / a
                break
        if ratio > 0:
            return [(1, 1), (-1, -1)], "exact"
        return [(1, -1), (-1, 1)], "exact"
    import random

    rng = random.Random(20181)
    found = set()
    trials = min(200_000, 4000 * (2**min(k, 6)))
    for _ in range(trials):
        combo = tuple(
            Fraction(rng.randint(-21, 21), rng.randint(1, 7)) for _ in range(dim)
        )
        signs = []
        ok = True
        for f in functionals:
            s = sum(a * b for a, b in zip(f, combo))
            if s == 0:
                ok = False
                break
            signs.append(1 if s > 0 else -1)
        if ok:
            found.add(tuple(signs))
    return sorted(found), "sampled"


def _check_space_invariance(action, space: SpaceDef):
    if not space.equations:
        return
    if action.kind == "finite":
        maps = [action.element_polymap(g) for g in action.generators]
        for f in space.equations:
            for m in maps:
                nf = normal_form(
                    f.compose(m), space.equations, assume_groebner=space.equations_groebner
                )
                if nf.is_member is not True:
                    raise ValueError(
                        f"space {space.name!r} is not invariant: equation "
                        f"{f.to_string(space.var_names)} leaves the ideal under the action"
                    )
    else:
        for xi in infinitesimal_generators(action):
            for f in space.equations:
                nf = normal_form(
                    xi.apply_to(f), space.equations, assume_groebner=space.equations_groebner
                )
                if nf.is_member is not True:
                    raise ValueError(
                        f"space {space.name!r} is not invariant under the torus action"
                    )


def orbit_type_partition(action, space: SpaceDef) -> Stratification:
    """Partition of the space by stabilizer conjugacy class, with exact dims.

    Finite actions: for each subgroup class with points of exactly that
    stabilizer, the stratum set is Fix(H) minus the strictly larger fixed
    loci; components come from sign vectors of the removed hyperplanes
    (codimension >= 2 removals cannot disconnect).  Torus actions: sets are
    grouped by the vanishing pattern of the weight planes.
    """
    _check_space_invariance(action, space)
    if action.kind == "finite":
        return _finite_orbit_types(action, space)
    return _torus_orbit_types(action, space)


def _finite_orbit_types(action: FiniteGroupAction, space: SpaceDef) -> Stratification:
    classes = conjugacy_classes_of_subgroups(action)
    subgroup_fix = {}
    for cls in classes:
        for h in cls:
            subgroup_fix[h] = fixed_subspace(action, h)
    all_subgroups = list(subgroup_fix)
    strata = []
    for idx, cls in enumerate(classes):
        rep = cls[0]

        def removed_for(h):
            fix = subgroup_fix[h]
            removed = []
            for k in all_subgroups:
                if k == h or not (set(h) <= set(k)):
                    continue
                fk = subgroup_fix[k]
                if _subspace_leq(fix, fk):
                    return None  # every point of Fix(H) has a larger stabilizer
                removed.append(fk)
            return removed

        rep_removed = removed_for(rep)
        if rep_removed is None:
            continue
        fix = subgroup_fix[rep]
        d = len(fix)
        if space.equations:
            sample, dim = _stratum_sample_on_space(action, space, rep, fix, rep_removed)
            if sample is None:
                continue
            components, note = None, "components not enumerated on a curved space"
        else:
            sample = _generic_fix_point(fix, rep_removed, space.nvars)
            dim = d
            # the orbit-type set is the union over the conjugacy class; each
            # member contributes the chambers of its own fixed subspace
            components = []
            note = ""
            for member_i, h in enumerate(cls):
                h_fix = subgroup_fix[h]
                h_removed = removed_for(h)
                functionals, higher = _hyperplane_functionals(h_fix, h_removed)
                if functionals is None:
                    components = None
                    break
                member_components, method = _sign_components(functionals, len(h_fix))
                if len(cls) == 1:
                    components.extend(member_components)
                else:
                    components.extend(
                        (member_i,) + c for c in member_components
                    )
                note = (
                    "codimension >= 2 removals do not disconnect"
                    if higher
                    else "components are the sign chambers of the removed hyperplanes"
                )
                if method == "sampled":
                    note += "; chambers enumerated by seeded sampling"
                if len(cls) > 1:
                    note += "; components are tagged by conjugacy-class member"
            if components is None:
                continue
        label = f"H{idx}|{len(rep)}" if len(rep) > 1 else "principal"
        strata.append(
            OrbitTypeStratum(
                label=label,
                stabilizer_descriptor=FiniteStabilizer(sorted(rep)),
                dim=dim,
                fix_basis=fix,
                components=components,
                components_note=note,
                sample=sample,
            )
        )
    order = []
    for a in strata:
        for b in strata:
            if a is not b and a.dim < b.dim and _subspace_leq(a.fix_basis, b.fix_basis):
                order.append((a.label, b.label))
    return Stratification(strata, order)


def _generic_fix_point(fix_basis, removed, nvars):
    if not fix_basis:
        return tuple(Fraction(0) for _ in range(nvars))
    n = len(fix_basis[0])
    weights = [Fraction(1, k + 2) for k in range(len(fix_basis))]
    for attempt in range(50):
        x = tuple(
            sum(w * b[i] for w, b in zip(weights, fix_basis)) for i in range(n)
        )
        if all(
            not _in_span(rb, x)
            for rb in removed
        ):
            return x
        weights = [w + Fraction(attempt + 1, 17) for w in weights]
    return None


def _in_span(basis, x):
    if not basis:
        return all(c == 0 for c in x)
    rows = [list(v) for v in basis]
    return rlinalg.rank(rows + [list(x)]) == rlinalg.rank(rows)


def _stratum_sample_on_space(action, space, h, fix, removed):
    """A sample of the stratum on a curved space, plus its exact dimension."""
    candidates = list(space.sample_points)
    for stratum in space.strata:
        candidates.extend(stratum.ambient_samples())
    for x in candidates:
        if not all(isinstance(v, (int, Fraction)) for v in x):
            continue
        stab = stabilizer(action, x)
        if frozenset(stab.elements) == frozenset(h) and space.contains(x):
            dim = _dim_on_space(space, h, x)
            return tuple(x), dim
    return None, None


def _dim_on_space(space, subgroup, x):
    from .polyalg import jacobian

    rows = []
    if space.equations:
        jac = jacobian(space.equations)
        rows.extend([[entry.eval(x) for entry in row] for row in jac])
    ident = _identity(space.nvars)
    for g in subgroup:
        if g == ident:
            continue
        for i in range(space.nvars):
            rows.append([g[i][j] - (1 if i == j else 0) for j in range(space.nvars)])
    return len(rlinalg.nullspace(rows)) if rows else space.nvars


def _torus_orbit_types(action: TorusAction, space: SpaceDef) -> Stratification:
    plane_indices = set()
    for i, j in action.planes:
        plane_indices.update((i, j))
    fixed_coords = [i for i in range(action.nvars) if i not in plane_indices]
    patterns = {}
    for active in _all_subsets(range(len(action.planes))):
        rows = [[row[p] for p in active] for row in action.weights]
        key = _lattice_key(rows, action.rank)
        patterns.setdefault(key, []).append(tuple(active))
    strata = []
    for idx, (key, active_sets) in enumerate(sorted(patterns.items())):
        best = None
        for active in active_sets:
            result = _torus_pattern_sample(action, space, active, fixed_coords)
            if result is None:
                continue
            sample, dim = result
            if best is None or dim > best[1]:
                best = (sample, dim, active)
        if best is None:
            continue
        sample, dim, active = best
        stab = stabilizer(action, sample)
        label = f"T{idx}|dim{stab.dim}"
        strata.append(
            OrbitTypeStratum(
                label=label,
                stabilizer_descriptor=stab,
                dim=dim,
                fix_basis=[],
                components=[()],
                components_note=(
                    "weight-plane removals have codimension >= 2 and do not disconnect"
                ),
                sample=tuple(sample),
            )
        )
    strata.sort(key=lambda s: s.dim)
    order = []
    for a in strata:
        for b in strata:
            if a is not b and a.dim < b.dim:
                order.append((a.label, b.label))
    return Stratification(strata, order)


def _all_subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _lattice_key(rows, rank):
    """Canonical key for the integer row lattice (Hermite normal form)."""
    mat = [list(int(v) for v in row) for row in rows if any(row)]
    if not mat:
        return ("zero", rank)
    h = _hermite_normal_form(mat)
    return ("hnf", tuple(tuple(row) for row in h))


def _hermite_normal_form(mat):
    m = [row[:] for row in mat]
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        # euclidean reduction in column c
        changed = True
        while changed:
            changed = False
            for i in range(r + 1, rows):
                if m[i][c] != 0:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if m[i][c] != 0:
                        m[r], m[i] = m[i], m[r]
                        changed = True
        if m[r][c] < 0:
            m[r] = [-a for a in m[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            m[i] = [a - q * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == rows:
            break
    return [row for row in m[:r] if any(row)]


def _torus_pattern_sample(action, space, active, fixed_coords):
    """A rational sample with exactly the given active planes, on the space."""
    candidates = []
    base = [Fraction(0)] * action.nvars
    candidates.append(tuple(base))
    for values in itertools.product((Fraction(1), Fraction(2), Fraction(3)), repeat=len(active)):
        x = list(base)
        for v, p in zip(values, active):
            i, _ = action.planes[p]
            x[i] = v
        candidates.append(tuple(x))
        for fc in fixed_coords:
            y = list(x)
            y[fc] = Fraction(1)
            candidates.append(tuple(y))
    candidates.extend(tuple(p) for p in space.sample_points)
    for x in candidates:
        if not all(isinstance(v, (int, Fraction)) for v in x):
            continue
        pattern = tuple(
            p
            for p in range(len(action.planes))
            if action.plane_component(x, p) != (0, 0)
        )
        if pattern != tuple(active):
            continue
        if not space.contains(x):
            continue
        return x, _torus_dim_at(action, space, x, active)
    return None


def _torus_dim_at(action, space, x, active):
    from .polyalg import jacobian

    rows = []
    if space.equations:
        jac = jacobian(space.equations)
        rows.extend([[entry.eval(x) for entry in row] for row in jac])
    for p in range(len(action.planes)):
        if p in active:
            continue
        i, j = action.planes[p]
        for c in (i, j):
            row = [Fraction(0)] * action.nvars
            row[c] = Fraction(1)
            rows.append(row)
    return len(rlinalg.nullspace(rows)) if rows else action.nvars


# -- invariants and the Hilbert embedding ----------------------------------------------


@dataclass
class InvarianceVerdict:
    per_generator: list  # (Polynomial, bool)

    @property
    def all_invariant(self):
        return all(ok for _, ok in self.per_generator)


def verify_invariant_gens(action, gens: Sequence[Polynomial]) -> InvarianceVerdict:
    """Exact invariance check per generator; completeness is never decided."""
    results = []
    if action.kind == "finite":
        maps = [action.element_polymap(g) for g in action.generators]
        for p in gens:
            results.append((p, all(p.compose(m) == p for m in maps)))
    else:
        fieldlist = infinitesimal_generators(action)
        for p in gens:
            results.append((p, all(xi.apply_to(p).is_zero() for xi in fieldlist)))
    return InvarianceVerdict(results)


class HilbertMap:
    """Invariant polynomial generators and the induced quotient embedding."""

    def __init__(
        self,
        generators: Sequence[Polynomial],
        target_names: Optional[Sequence[str]] = None,
        relations: Sequence[Polynomial] = (),
    ):
        self.generators = list(generators)
        if not self.generators:
            raise ValueError("HilbertMap needs at least one generator")
        self.source_nvars = self.generators[0].nvars
        k = len(self.generators)
        if target_names is None:
            target_names = [f"p{i+1}" for i in range(k)]
        if len(target_names) != k:
            raise ValueError("target_names length must match generator count")
        self.target_names = list(target_names)
        self.relations = list(relations)
        for r in self.relations:
            if r.nvars != k:
                raise ValueError("relation must live in the target variables")
            if not r.compose(self.generators).is_zero():
                raise ValueError(
                    f"declared relation {r.to_string(self.target_names)} does not vanish "
                    "after composing with the generators"
                )

    @property
    def target_nvars(self):
        return len(self.generators)

    def apply(self, x):
        return tuple(p.eval(x) for p in self.generators)

    def __repr__(self):
        return f"HilbertMap({len(self.generators)} generators, R^{self.source_nvars} -> R^{self.target_nvars})"


@dataclass
class EmbeddingReport:
    images: list
    gens_invariant: bool
    relations_hold: bool
    separation: str  # "verified" | "failed" | "skipped (torus)"
    separation_witness: Optional[tuple] = None
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.gens_invariant and self.relations_hold and self.separation != "failed"


def hilbert_embed(action, hm: HilbertMap, samples) -> EmbeddingReport:
    """Map samples through the invariant generators and audit the embedding.

    Checks that declared relations vanish both symbolically and on the images,
    and (finite groups, rational samples) that the generator map separates
    orbits exactly: p(x) = p(y) iff some group element carries x to y.  A
    separation failure witnesses that the generators do not generate the full
    invariant ring.
    """
    verdict = verify_invariant_gens(action, hm.generators)
    if not verdict.all_invariant:
        bad = [p.to_string() for p, ok in verdict.per_generator if not ok]
        raise ValueError(f"generators not invariant: {bad}")
    images = [hm.apply(x) for x in samples]
    relations_hold = True
    for r in hm.relations:
        if not r.compose(hm.generators).is_zero():
            relations_hold = False
        for img in images:
            v = r.eval(img)
            if isinstance(v, Fraction):
                if v != 0:
                    relations_hold = False
            elif abs(v) > 1e-9:
                relations_hold = False
    notes = []
    witness = None
    if action.kind == "finite":
        exact_samples = [
            tuple(Fraction(v) for v in x)
            for x in samples
            if all(isinstance(v, (int, Fraction)) for v in x)
        ]
        separation = "verified"
        for a in range(len(exact_samples)):
            for b in range(len(exact_samples)):
                x, y = exact_samples[a], exact_samples[b]
                same_image = hm.apply(x) == hm.apply(y)
                same_orbit = any(_mat_vec(g, x) == y for g in action.elements)
                if same_image != same_orbit:
                    separation = "failed"
                    witness = (x, y, "image" if same_image else "orbit")
                    break
            if separation == "failed":
                break
        if len(exact_samples) < len(samples):
            notes.append("separation checked on the rational samples only")
    else:
        separation = "skipped (torus)"
        notes.append("orbit separation is only decided exactly for finite groups")
    return EmbeddingReport(
        images=images,
        gens_invariant=True,
        relations_hold=relations_hold,
        separation=separation,
        separation_witness=witness,
        notes=notes,
    )


def infinitesimal_generators(action) -> list:
    """One linear derivation per torus factor; empty for finite groups."""
    if action.kind == "finite":
        return []
    out = []
    n = action.nvars
    for k, row in enumerate(action.weights):
        comps = [Polynomial.zero(n) for _ in range(n)]
        for p, m in enumerate(row):
            if m == 0:
                continue
            i, j = action.planes[p]
            comps[i] = comps[i] - Polynomial.variable(n, j) * m
            comps[j] = comps[j] + Polynomial.variable(n, i) * m
        out.append(Derivation(comps, name=f"xi{k+1}"))
    return out


def reynolds_average(action: FiniteGroupAction, p: Polynomial) -> Polynomial:
    """Group-average of a polynomial: the Reynolds projection onto invariants."""
    total = Polynomial.zero(p.nvars)
    for g in action.elements:
        total = total + p.compose(action.element_polymap(g))
    return total * Fraction(1, action.order)
