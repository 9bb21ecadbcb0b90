"""Subcartesian spaces as semialgebraic subsets of R^n, and their tangent spaces.

A space is cut out by polynomial equation generators (the user contract is
that these generate the real vanishing ideal of the point set) together with
polynomial inequalities.  A union of such blocks is supported through
``pieces`` for sets like an open disc glued to a line, which a single
conjunctive block cannot express.

Tangent dimensions are exact: the Zariski tangent space at a rational point
is the kernel of the Jacobian of the equation generators, computed by
fraction-free elimination over Q.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import rlinalg
from .polyalg import Polynomial, is_groebner_basis_syntactic, jacobian

GE = ">="
GT = ">"

__all__ = [
    "GE",
    "GT",
    "Piece",
    "StratumParam",
    "SpaceDef",
    "TangentSpace",
    "contains",
    "zariski_tangent",
    "orbital_tangent",
    "delta_profile",
    "numeric_rank",
]


def _is_exact_point(x) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in x)


class Piece:
    """One conjunctive block of a union-of-blocks space description."""

    def __init__(self, equations=(), inequalities=()):
        self.equations = list(equations)
        self.inequalities = [(p, rel) for p, rel in inequalities]
        for p, rel in self.inequalities:
            if rel not in (GE, GT):
                raise ValueError(f"inequality relation must be '>=' or '>', got {rel!r}")

    def has_strict(self) -> bool:
        return any(rel == GT for _, rel in self.inequalities)

    def satisfied(self, x, tol: float = 0.0) -> bool:
        exact = _is_exact_point(x) and tol == 0.0
        for f in self.equations:
            v = f.eval(x)
            if exact:
                if v != 0:
                    return False
            elif abs(v) > tol:
                return False
        for g, rel in self.inequalities:
            v = g.eval(x)
            if exact:
                if rel == GE and v < 0:
                    return False
                if rel == GT and v <= 0:
                    return False
            else:
                if v < -tol:
                    return False
        return True


class StratumParam:
    """A polynomial parametrization of one stratum of a space.

    ``mapping`` has one polynomial per ambient coordinate, in ``domain_dim``
    parameters.  The immersion condition (full-rank Jacobian at the sampled
    parameter points) is checked numerically at construction.
    """

    def __init__(
        self,
        name: str,
        domain_dim: int,
        mapping: Sequence[Polynomial],
        open_constraints=(),
        stabilizer_label: Optional[str] = None,
        param_samples=None,
        immersion_tol: float = 1e-9,
    ):
        self.name = name
        self.domain_dim = domain_dim
        self.mapping = list(mapping)
        self.open_constraints = [(p, rel) for p, rel in open_constraints]
        self.stabilizer_label = stabilizer_label
        for p in self.mapping:
            if p.nvars != domain_dim:
                raise ValueError(
                    f"stratum {name!r}: map component has {p.nvars} parameters, "
                    f"expected {domain_dim}"
                )
        if param_samples is None:
            param_samples = self._default_samples()
        self.param_samples = [tuple(s) for s in param_samples]
        if domain_dim > 0:
            self._check_immersion(immersion_tol)

    def _default_samples(self):
        if self.domain_dim == 0:
            return [()]
        grid = [Fraction(v) for v in (1, -1, Fraction(1, 2), 2, Fraction(-3, 2))]
        samples = []
        for combo in itertools.product(grid, repeat=self.domain_dim):
            if all(
                (g.eval(combo) > 0 if rel == GT else g.eval(combo) >= 0)
                for g, rel in self.open_constraints
            ):
                samples.append(combo)
            if len(samples) >= 4:
                break
        if not samples:
            raise ValueError(
                f"stratum {self.name!r}: no parameter sample satisfies the open constraints"
            )
        return samples

    def _check_immersion(self, tol: float):
        jac = jacobian(self.mapping)
        for s in self.param_samples:
            m = np.array([[float(entry.eval(s)) for entry in row] for row in jac])
            sv = np.linalg.svd(m, compute_uv=False)
            r = int(np.sum(sv > tol * max(1.0, sv[0] if len(sv) else 1.0)))
            if r < self.domain_dim:
                raise ValueError(
                    f"stratum {self.name!r}: parametrization is not an immersion at {s} "
                    f"(rank {r} < {self.domain_dim})"
                )

    def point_at(self, params):
        return tuple(p.eval(params) for p in self.mapping)

    def ambient_samples(self):
        return [self.point_at(s) for s in self.param_samples]


class SpaceDef:
    """A subcartesian space presented as a semialgebraic subset of R^n.

    equations     generators of the vanishing ideal of the point set
                  (real-radical generators: user contract, see README)
    inequalities  list of (polynomial, '>=') or (polynomial, '>')
    pieces        optional extra conjunctive blocks whose union, intersected
                  with the global constraints, is the point set
    strata        optional stratum parametrizations; each must satisfy the
                  equations identically (checked symbolically here)
    """

    def __init__(
        self,
        nvars: int,
        var_names: Optional[Sequence[str]] = None,
        equations: Sequence[Polynomial] = (),
        inequalities=(),
        pieces: Optional[Sequence[Piece]] = None,
        strata: Sequence[StratumParam] = (),
        sample_points=None,
        equations_groebner: Optional[bool] = None,
        name: str = "space",
    ):
        self.nvars = nvars
        if var_names is None:
            var_names = [f"x{i+1}" for i in range(nvars)]
        if len(var_names) != nvars:
            raise ValueError("var_names length must equal nvars")
        self.var_names = list(var_names)
        self.name = name
        self.equations = list(equations)
        self.inequalities = [(p, rel) for p, rel in inequalities]
        self.pieces = list(pieces) if pieces else []
        self.strata = list(strata)
        for f in self.equations:
            if f.nvars != nvars:
                raise ValueError("equation nvars mismatch")
        for g, rel in self.inequalities:
            if g.nvars != nvars:
                raise ValueError("inequality nvars mismatch")
            if rel not in (GE, GT):
                raise ValueError(f"inequality relation must be '>=' or '>', got {rel!r}")
        if equations_groebner is None:
            equations_groebner = bool(self.equations) and is_groebner_basis_syntactic(
                self.equations
            )
        self.equations_groebner = equations_groebner
        self._check_strata()
        self.sample_points = self._resolve_samples(sample_points)

    # -- derived flags ----------------------------------------------------------

    @property
    def locally_compact(self) -> Optional[bool]:
        """True for closed descriptions; None (unknown) when any strict inequality appears."""
        if any(rel == GT for _, rel in self.inequalities):
            return None
        if any(piece.has_strict() for piece in self.pieces):
            return None
        return True

    # -- construction checks ------------------------------------------------------

    def _check_strata(self):
        for stratum in self.strata:
            if any(p.nvars != 0 for p in stratum.mapping) and len(
                stratum.mapping
            ) != self.nvars:
                raise ValueError(
                    f"stratum {stratum.name!r} maps into R^{len(stratum.mapping)}, "
                    f"space lives in R^{self.nvars}"
                )
            for f in self.equations:
                composed = f.compose(stratum.mapping) if stratum.domain_dim else None
                if stratum.domain_dim == 0:
                    value = f.eval(stratum.point_at(()))
                    ok = value == 0
                else:
                    ok = composed.is_zero()
                if not ok:
                    raise ValueError(
                        f"equation {f.to_string(self.var_names)} does not vanish on "
                        f"stratum {stratum.name!r}"
                    )

    def _resolve_samples(self, sample_points):
        if sample_points:
            pts = [tuple(p) for p in sample_points]
            for p in pts:
                if len(p) != self.nvars:
                    raise ValueError("sample point dimension mismatch")
                if not self.contains(p):
                    raise ValueError(f"declared sample point {p} is not on the space")
            return pts
        found = self._find_sample()
        if found is None:
            raise ValueError(
                f"space {self.name!r}: no sample point found; pass sample_points explicitly"
            )
        return [found]

    def _find_sample(self):
        for stratum in self.strata:
            for p in stratum.ambient_samples():
                if self.contains(p):
                    return p
        values = [Fraction(v) for v in (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))]
        if self.nvars <= 4:
            candidates = itertools.product(values, repeat=self.nvars)
        else:
            candidates = (
                tuple(v if i == j else Fraction(0) for i in range(self.nvars))
                for j in range(self.nvars)
                for v in values
            )
        for x in candidates:
            if self.contains(x):
                return tuple(x)
        return None

    # -- membership -----------------------------------------------------------------

    def contains(self, x, tol: float = 0.0) -> bool:
        """Membership verdict: exact for rational points, |f| <= tol for floats."""
        if len(x) != self.nvars:
            raise ValueError(f"point has length {len(x)}, expected {self.nvars}")
        exact = _is_exact_point(x) and tol == 0.0
        for f in self.equations:
            v = f.eval(x)
            if exact:
                if v != 0:
                    return False
            elif abs(v) > tol:
                return False
        for g, rel in self.inequalities:
            v = g.eval(x)
            if exact:
                if rel == GE and v < 0:
                    return False
                if rel == GT and v <= 0:
                    return False
            else:
                if v < -tol:
                    return False
        if self.pieces:
            return any(piece.satisfied(x, 0.0 if exact else tol) for piece in self.pieces)
        return True

    def active_inequalities(self, x, tol: float = 0.0):
        """Indices of inequality constraints with g(x) = 0 (within tol)."""
        active = []
        exact = _is_exact_point(x) and tol == 0.0
        for i, (g, _rel) in enumerate(self.inequalities):
            v = g.eval(x)
            if (exact and v == 0) or (not exact and abs(v) <= tol):
                active.append(i)
        return active

    def __repr__(self):
        return f"SpaceDef({self.name!r}, nvars={self.nvars}, eqs={len(self.equations)})"


class TangentSpace:
    """A tangent space at a point: an exact or numeric basis plus its dimension."""

    def __init__(self, base_point, basis, kind: str = "zariski"):
        self.base_point = tuple(base_point)
        self.basis = [tuple(v) for v in basis]
        self.kind = kind

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_json(self) -> str:
        def enc(v):
            return str(v) if isinstance(v, (Fraction, int)) else float(v)

        payload = {
            "kind": self.kind,
            "base_point": [enc(v) for v in self.base_point],
            "dim": self.dim,
            "basis": [[enc(v) for v in vec] for vec in self.basis],
        }
        return json.dumps(payload, sort_keys=True)

    def __repr__(self):
        return f"TangentSpace(dim={self.dim} at {self.base_point})"


def contains(space: SpaceDef, x, tol: float = 0.0) -> bool:
    return space.contains(x, tol)


def zariski_tangent(space: SpaceDef, x) -> TangentSpace:
    """Kernel of the Jacobian of the equation generators at a rational point.

    The dimension is exact and is a diffeomorphism invariant of the space,
    provided the equations generate the real vanishing ideal (user contract).
    """
    x = tuple(Fraction(v) if isinstance(v, int) else v for v in x)
    if not _is_exact_point(x):
        raise ValueError("zariski_tangent requires a rational point")
    if not space.contains(x):
        raise ValueError(f"point {x} is not on space {space.name!r}")
    if not space.equations:
        basis = [
            tuple(Fraction(1) if i == j else Fraction(0) for i in range(space.nvars))
            for j in range(space.nvars)
        ]
        return TangentSpace(x, basis)
    jac = jacobian(space.equations)
    rows = [[entry.eval(x) for entry in row] for row in jac]
    return TangentSpace(x, rlinalg.nullspace(rows))


def numeric_rank(vectors, tol: float = 1e-8) -> int:
    """Rank of a stack of float vectors via SVD with the stated tolerance."""
    m = np.asarray(vectors, dtype=np.float64)
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, float(sv[0]))))


def orbital_tangent(space: SpaceDef, family, x, tol: float = 1e-8) -> TangentSpace:
    """Span of the family's values at x; always inside the Zariski tangent space.

    Family members are derivations (objects with polynomial ``components``);
    each is required to be admissible on the space.  Exact at rational
    points, numeric rank with the stated tolerance otherwise.
    """
    from .fields import is_admissible

    for X in family:
        verdict = is_admissible(space, X)
        if verdict.admissible is False:
            raise ValueError(f"family member {X} is not admissible on {space.name!r}")
    values = [X.value_at(x) for X in family]
    if not values:
        return TangentSpace(x, [], kind="orbital")
    if _is_exact_point(x):
        rows = [list(v) for v in values]
        echelon, pivots = rlinalg.bareiss_echelon(rows)
        basis = [tuple(Fraction(c) for c in row) for row in echelon]
        return TangentSpace(x, basis, kind="orbital")
    m = np.asarray([[float(c) for c in v] for v in values])
    r = numeric_rank(m, tol)
    # an orthonormal basis for the numeric span
    u, s, vt = np.linalg.svd(m)
    basis = [tuple(vt[i]) for i in range(r)]
    return TangentSpace(x, basis, kind="orbital")


def delta_profile(space: SpaceDef, family, sample_points, tol: float = 1e-8):
    """Orbital tangent dimension at each sampled point."""
    return [
        (tuple(x), orbital_tangent(space, family, x, tol).dim) for x in sample_points
    ]
