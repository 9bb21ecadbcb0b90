"""Exterior calculus with rational-function coefficients, all exact.

Forms are stored canonically: strictly increasing index tuples, zero
coefficients pruned.  Pullback substitutes polynomial map components and
expands the Jacobian factors, so identities like functoriality and
commutation with d hold on the nose, not approximately.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import rlinalg
from .polyalg import Polynomial, RationalFunction, normal_form

__all__ = [
    "DifferentialForm",
    "PolyMap",
    "CheckResult",
    "WitnessResult",
    "wedge",
    "exterior_d",
    "pullback",
    "interior_product",
    "is_invariant",
    "is_horizontal",
    "is_basic",
    "find_descent_witness",
]


def _sort_with_sign(indices):
    """Sort an index tuple, returning (sorted_tuple, sign); sign 0 on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return tuple(idx), 0
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return tuple(idx), sign


def _coerce_coefficient(c, nvars) -> RationalFunction:
    if isinstance(c, RationalFunction):
        return c
    if isinstance(c, Polynomial):
        return RationalFunction(c)
    if isinstance(c, (int, Fraction)):
        return RationalFunction.constant(nvars, c)
    raise TypeError(f"bad coefficient type {type(c).__name__}")


class DifferentialForm:
    """A degree-k exterior form on ambient R^n with RationalFunction coefficients."""

    def __init__(self, nvars: int, degree: int, terms=None):
        if degree < 0:
            raise ValueError("degree must be non-negative")
        if degree > nvars and terms:
            raise ValueError(f"degree {degree} exceeds nvars {nvars}")
        self.nvars = nvars
        self.degree = degree
        clean = {}
        if terms:
            for idx, c in terms.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise ValueError(f"index tuple {idx} has length {len(idx)}, expected {degree}")
                sorted_idx, sign = _sort_with_sign(idx)
                if sign == 0:
                    continue
                if any(not 0 <= i < nvars for i in sorted_idx):
                    raise ValueError(f"index out of range in {idx}")
                rf = _coerce_coefficient(c, nvars) * sign
                if sorted_idx in clean:
                    rf = clean[sorted_idx] + rf
                if rf.is_zero():
                    clean.pop(sorted_idx, None)
                else:
                    clean[sorted_idx] = rf
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int, degree: int = 0):
        return cls(nvars, degree, {})

    @classmethod
    def from_function(cls, f):
        rf = f if isinstance(f, RationalFunction) else RationalFunction(f)
        return cls(rf.nvars, 0, {(): rf})

    @classmethod
    def coordinate_differential(cls, nvars: int, i: int):
        """The 1-form dx_i."""
        return cls(nvars, 1, {(i,): RationalFunction.constant(nvars, 1)})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, idx) -> RationalFunction:
        sorted_idx, sign = _sort_with_sign(tuple(idx))
        if sign == 0:
            return RationalFunction.zero(self.nvars)
        c = self.terms.get(sorted_idx)
        if c is None:
            return RationalFunction.zero(self.nvars)
        return c * sign

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.nvars != other.nvars or self.degree != other.degree:
            raise ValueError("form shape mismatch in addition")
        terms = dict(self.terms)
        for idx, c in other.terms.items():
            s = terms.get(idx, RationalFunction.zero(self.nvars)) + c
            if s.is_zero():
                terms.pop(idx, None)
            else:
                terms[idx] = s
        return DifferentialForm(self.nvars, self.degree, terms)

    def __neg__(self):
        return DifferentialForm(
            self.nvars, self.degree, {i: -c for i, c in self.terms.items()}
        )

    def __sub__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, Fraction, Polynomial, RationalFunction)):
            return DifferentialForm(
                self.nvars, self.degree, {i: c * scalar for i, c in self.terms.items()}
            )
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.nvars == other.nvars
        return (
            self.nvars == other.nvars
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, self.degree, frozenset(self.terms.items())))

    def to_string(self, var_names: Optional[Sequence[str]] = None) -> str:
        if var_names is None:
            var_names = [f"x{i+1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for idx in sorted(self.terms):
            c = self.terms[idx]
            wedge_part = "^".join(f"d{var_names[i]}" for i in idx)
            cs = c.to_string(var_names)
            if not idx:
                parts.append(cs)
            elif cs == "1":
                parts.append(wedge_part)
            else:
                parts.append(f"({cs}) {wedge_part}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DifferentialForm({self.to_string()})"


class PolyMap:
    """A polynomial map R^source -> R^target, one component per target coordinate."""

    def __init__(self, source_nvars: int, components: Sequence[Polynomial]):
        self.source_nvars = source_nvars
        self.components = list(components)
        for c in self.components:
            if c.nvars != source_nvars:
                raise ValueError("component nvars mismatch")

    @property
    def target_nvars(self):
        return len(self.components)

    @classmethod
    def identity(cls, nvars: int):
        return cls(nvars, [Polynomial.variable(nvars, i) for i in range(nvars)])

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """self after inner: (self . inner)(x) = self(inner(x))."""
        if inner.target_nvars != self.source_nvars:
            raise ValueError("composition arity mismatch")
        return PolyMap(
            inner.source_nvars, [c.compose(inner.components) for c in self.components]
        )

    def apply(self, x):
        return tuple(c.eval(x) for c in self.components)

    def __repr__(self):
        return f"PolyMap(R^{self.source_nvars} -> R^{self.target_nvars})"


def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    """Exact graded-commutative wedge product."""
    if alpha.nvars != beta.nvars:
        raise ValueError("nvars mismatch in wedge")
    n = alpha.nvars
    degree = alpha.degree + beta.degree
    if degree > n:
        return DifferentialForm.zero(n, min(degree, n))
    terms = {}
    for ia, ca in alpha.terms.items():
        for ib, cb in beta.terms.items():
            idx, sign = _sort_with_sign(ia + ib)
            if sign == 0:
                continue
            c = ca * cb * sign
            if idx in terms:
                c = terms[idx] + c
            if c.is_zero():
                terms.pop(idx, None)
            else:
                terms[idx] = c
    return DifferentialForm(n, degree, terms)


def exterior_d(alpha: DifferentialForm) -> DifferentialForm:
    """Exterior derivative, exact; d of a top-degree form is zero."""
    n = alpha.nvars
    if alpha.degree >= n:
        return DifferentialForm.zero(n, min(alpha.degree + 1, n))
    terms = {}
    for idx, c in alpha.terms.items():
        for j in range(n):
            if j in idx:
                continue
            dc = c.diff(j)
            if dc.is_zero():
                continue
            new_idx, sign = _sort_with_sign((j,) + idx)
            v = dc * sign
            if new_idx in terms:
                v = terms[new_idx] + v
            if v.is_zero():
                terms.pop(new_idx, None)
            else:
                terms[new_idx] = v
    return DifferentialForm(n, alpha.degree + 1, terms)


def pullback(f_map: PolyMap, alpha: DifferentialForm) -> DifferentialForm:
    """F* alpha by exact substitution and Jacobian expansion.

    Raises ZeroDivisionError when a coefficient denominator vanishes
    identically on the image of the map.
    """
    if alpha.nvars != f_map.target_nvars:
        raise ValueError(
            f"form lives on R^{alpha.nvars}, map lands in R^{f_map.target_nvars}"
        )
    n = f_map.source_nvars
    differentials = []
    for comp in f_map.components:
        terms = {}
        for j in range(n):
            dj = comp.diff(j)
            if not dj.is_zero():
                terms[(j,)] = RationalFunction(dj)
        differentials.append(DifferentialForm(n, 1, terms))
    result = DifferentialForm.zero(n, alpha.degree)
    for idx, c in alpha.terms.items():
        pulled_coeff = c.compose(f_map.components)
        factor = DifferentialForm(n, 0, {(): RationalFunction.constant(n, 1)})
        for i in idx:
            factor = wedge(factor, differentials[i])
        result = result + factor * pulled_coeff
    return result


def interior_product(x_field, alpha: DifferentialForm) -> DifferentialForm:
    """Contraction of a derivation into the first slot; zero on functions."""
    components = x_field.components
    if len(components) != alpha.nvars:
        raise ValueError("nvars mismatch in interior product")
    n = alpha.nvars
    if alpha.degree == 0:
        return DifferentialForm.zero(n, 0)
    terms = {}
    for idx, c in alpha.terms.items():
        for r, i in enumerate(idx):
            comp = components[i]
            if comp.is_zero():
                continue
            rest = idx[:r] + idx[r + 1 :]
            v = c * comp * ((-1) ** r)
            if rest in terms:
                v = terms[rest] + v
            if v.is_zero():
                terms.pop(rest, None)
            else:
                terms[rest] = v
    return DifferentialForm(n, alpha.degree - 1, terms)


@dataclass
class CheckResult:
    holds: Optional[bool]
    certainty: str  # "symbolic" | "inconclusive"
    details: list

    def __bool__(self):
        return self.holds is True


def is_invariant(action, alpha: DifferentialForm) -> CheckResult:
    """Exact invariance: all group pullbacks equal the form (finite), or all
    Lie derivatives vanish via the Cartan formula (torus)."""
    if action.kind == "finite":
        for g in action.elements:
            gm = PolyMap(action.nvars, action.element_polymap(g))
            if pullback(gm, alpha) != alpha:
                return CheckResult(False, "symbolic", [f"pullback by {g} differs"])
        return CheckResult(True, "symbolic", [])
    from .actions import infinitesimal_generators

    for xi in infinitesimal_generators(action):
        lie = exterior_d(interior_product(xi, alpha)) + interior_product(
            xi, exterior_d(alpha)
        )
        if not lie.is_zero():
            return CheckResult(False, "symbolic", [f"L_{xi.name} alpha != 0"])
    return CheckResult(True, "symbolic", [])


def is_horizontal(action, alpha: DifferentialForm, space=None) -> CheckResult:
    """Contractions with the orbit directions vanish modulo the equation ideal.

    Finite groups have zero-dimensional orbits, so every form is horizontal.
    """
    if action.kind == "finite":
        return CheckResult(True, "symbolic", ["finite group: orbits are points"])
    from .actions import infinitesimal_generators

    equations = list(space.equations) if space is not None else []
    groebner = space.equations_groebner if space is not None else True
    inconclusive = []
    for xi in infinitesimal_generators(action):
        contraction = interior_product(xi, alpha)
        for idx, c in contraction.terms.items():
            if not equations:
                return CheckResult(
                    False, "symbolic", [f"{xi.name} contraction has coefficient {c}"]
                )
            nf = normal_form(c.num, equations, assume_groebner=groebner)
            if nf.certainty == "certain-nonmember":
                return CheckResult(
                    False,
                    "symbolic",
                    [f"{xi.name} contraction does not vanish on the space"],
                )
            if nf.certainty == "inconclusive":
                inconclusive.append((xi.name, idx))
    if inconclusive:
        return CheckResult(None, "inconclusive", [str(x) for x in inconclusive])
    return CheckResult(True, "symbolic", [])


def is_basic(action, alpha: DifferentialForm, space=None) -> CheckResult:
    inv = is_invariant(action, alpha)
    if inv.holds is False:
        return CheckResult(False, "symbolic", ["not invariant"] + inv.details)
    hor = is_horizontal(action, alpha, space)
    if hor.holds is False:
        return CheckResult(False, "symbolic", ["not horizontal"] + hor.details)
    if inv.holds and hor.holds:
        return CheckResult(True, "symbolic", [])
    return CheckResult(None, "inconclusive", inv.details + hor.details)


# -- descent witnesses --------------------------------------------------------------


@dataclass
class WitnessResult:
    status: str  # "found" | "no witness up to bound"
    witness: Optional[DifferentialForm]
    degree_bound: int

    @property
    def found(self):
        return self.status == "found"


def _monomials_up_to(nvars: int, degree: int):
    mons = []

    def rec(prefix, remaining, budget):
        if remaining == 0:
            mons.append(tuple(prefix))
            return
        for d in range(budget + 1):
            rec(prefix + [d], remaining - 1, budget - d)

    rec([], nvars, degree)
    return sorted(mons)


def _increasing_tuples(n: int, k: int):
    import itertools

    return list(itertools.combinations(range(n), k))


def find_descent_witness(
    action,
    hm,
    alpha: DifferentialForm,
    degree_bound: Optional[int] = None,
    space=None,
    denominator: Optional[Polynomial] = None,
) -> WitnessResult:
    """Search for beta on the quotient variables with pullback(hm, beta) = alpha.

    The unknowns are polynomial coefficients of beta up to degree_bound
    (default: deg(alpha) + the maximal generator degree); the equation
    pullback(hm, beta) = alpha is exact and linear in them, solved over Q.
    Exhausting the bound is reported as such, never as a refutation.

    Some basic forms only descend to rational-coefficient witnesses (the
    standard area form through the cone map needs a 1/u).  Passing a
    ``denominator`` q in the quotient variables searches for beta' with
    pullback(beta') = (q o pi) * alpha and returns the witness beta'/q.
    """
    basic = is_basic(action, alpha, space)
    if basic.holds is False:
        raise ValueError("form is not basic; no descent witness can exist")
    for c in alpha.terms.values():
        if not c.is_polynomial():
            raise ValueError(
                "witness search handles polynomial coefficients; verify rational "
                "witnesses directly via pullback"
            )
    k = hm.target_nvars
    n = hm.source_nvars
    pi = PolyMap(n, hm.generators)
    target = alpha
    if denominator is not None:
        if denominator.nvars != k:
            raise ValueError("denominator must live in the quotient variables")
        target = alpha * denominator.compose(hm.generators)
    if degree_bound is None:
        alpha_deg = max(
            (c.num.total_degree() for c in target.terms.values()), default=0
        )
        gen_deg = max(p.total_degree() for p in hm.generators)
        degree_bound = alpha_deg + gen_deg
    monomials = _monomials_up_to(k, degree_bound)
    index_tuples = _increasing_tuples(k, alpha.degree)
    if alpha.degree > k:
        return WitnessResult("no witness up to bound", None, degree_bound)

    columns = []
    unknowns = []
    for idx in index_tuples:
        for mon in monomials:
            beta_term = DifferentialForm(
                k, alpha.degree, {idx: RationalFunction(Polynomial(k, {mon: 1}))}
            )
            pulled = pullback(pi, beta_term)
            columns.append(pulled)
            unknowns.append((idx, mon))

    # collect every (source index tuple, source monomial) appearing anywhere
    keys = set()
    for form in columns + [target]:
        for idx, c in form.terms.items():
            p = c.as_polynomial()
            for e in p.terms:
                keys.add((idx, e))
    keys = sorted(keys)
    key_pos = {kk: i for i, kk in enumerate(keys)}
    matrix = [[Fraction(0)] * len(columns) for _ in keys]
    rhs = [Fraction(0)] * len(keys)
    for col, form in enumerate(columns):
        for idx, c in form.terms.items():
            p = c.as_polynomial()
            for e, coeff in p.terms.items():
                matrix[key_pos[(idx, e)]][col] = coeff
    for idx, c in target.terms.items():
        p = c.as_polynomial()
        for e, coeff in p.terms.items():
            rhs[key_pos[(idx, e)]] = coeff
    solution = rlinalg.solve(matrix, rhs)
    if solution is None:
        return WitnessResult("no witness up to bound", None, degree_bound)
    terms = {}
    for (idx, mon), value in zip(unknowns, solution):
        if value == 0:
            continue
        poly = Polynomial(k, {mon: value})
        c = terms.get(idx, RationalFunction.zero(k)) + poly
        if c.is_zero():
            terms.pop(idx, None)
        else:
            terms[idx] = c
    if denominator is not None:
        terms = {idx: c / denominator for idx, c in terms.items()}
    beta = DifferentialForm(k, alpha.degree, terms)
    return WitnessResult("found", beta, degree_bound)
