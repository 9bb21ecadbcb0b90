"""Constant symplectic structures on R^2n and momentum-map machinery.

Supports linear torus actions and finite symplectic actions.  Momentum maps
are derived by exact polynomial integration of the contraction identity and
re-verified symbolically; finite groups get the zero momentum map (their Lie
algebra is trivial).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import rlinalg
from .actions import (
    HilbertMap,
    Stratification,
    infinitesimal_generators,
    orbit_type_partition,
)
from .diffspace import SpaceDef, StratumParam
from .fields import Derivation
from .forms import (
    DifferentialForm,
    PolyMap,
    exterior_d,
    interior_product,
    is_invariant,
    pullback,
)
from .polyalg import Polynomial, RationalFunction

__all__ = [
    "SymplecticForm",
    "MomentumMap",
    "ReducedStrata",
    "SjamaarVerdict",
    "hamiltonian_vector_field",
    "derive_momentum_map",
    "zero_level",
    "reduced_strata",
    "poisson_bracket",
    "check_sjamaar",
]


class SymplecticForm:
    """A constant-coefficient symplectic form, stored as its matrix.

    omega(e_i, e_j) = matrix[i][j]; the matrix must be antisymmetric and
    invertible.  Closedness is automatic for constant coefficients.
    """

    def __init__(self, matrix):
        self.matrix = tuple(tuple(Fraction(v) for v in row) for row in matrix)
        n = len(self.matrix)
        self.nvars = n
        for i in range(n):
            if len(self.matrix[i]) != n:
                raise ValueError("matrix must be square")
            for j in range(n):
                if self.matrix[i][j] != -self.matrix[j][i]:
                    raise ValueError("matrix must be antisymmetric")
        if rlinalg.rank([list(row) for row in self.matrix]) != n:
            raise ValueError("matrix must be invertible")
        self._inverse = None

    @classmethod
    def standard(cls, nvars: int, pairs: Optional[Sequence] = None):
        """sum dx_i ^ dx_j over the given coordinate pairs (default consecutive)."""
        if pairs is None:
            if nvars % 2:
                raise ValueError("standard form needs an even number of variables")
            pairs = [(2 * k, 2 * k + 1) for k in range(nvars // 2)]
        m = [[Fraction(0)] * nvars for _ in range(nvars)]
        for i, j in pairs:
            m[i][j] = Fraction(1)
            m[j][i] = Fraction(-1)
        return cls(m)

    def inverse(self):
        if self._inverse is None:
            n = self.nvars
            cols = []
            for j in range(n):
                e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
                cols.append(rlinalg.solve([list(r) for r in self.matrix], e))
            self._inverse = tuple(
                tuple(cols[j][i] for j in range(n)) for i in range(n)
            )
        return self._inverse

    def as_form(self) -> DifferentialForm:
        terms = {}
        for i in range(self.nvars):
            for j in range(i + 1, self.nvars):
                if self.matrix[i][j] != 0:
                    terms[(i, j)] = RationalFunction.constant(
                        self.nvars, self.matrix[i][j]
                    )
        return DifferentialForm(self.nvars, 2, terms)

    def __repr__(self):
        return f"SymplecticForm(nvars={self.nvars})"


def hamiltonian_vector_field(omega: SymplecticForm, f) -> Derivation:
    """X_f with X_f contracted into omega equal to -df, exact.

    Accepts a Polynomial (or a RationalFunction that reduces to one);
    genuinely rational Hamiltonians are handled by poisson_bracket, which
    never materializes the field.
    """
    if isinstance(f, RationalFunction):
        f = f.as_polynomial()
    n = omega.nvars
    if f.nvars != n:
        raise ValueError("nvars mismatch")
    inv = omega.inverse()
    grad = [f.diff(i) for i in range(n)]
    comps = []
    for i in range(n):
        total = Polynomial.zero(n)
        for j in range(n):
            if inv[i][j] != 0:
                total = total + grad[j] * inv[i][j]
        comps.append(total)
    return Derivation(comps, name=f"X[{f.to_string()}]")


class MomentumMap:
    """One quadratic component per torus generator, assembled into Phi."""

    def __init__(self, omega: SymplecticForm, components: Sequence[Polynomial], action=None):
        self.omega = omega
        self.components = list(components)
        self.action = action

    @property
    def nvars(self):
        return self.omega.nvars

    def apply(self, x):
        return tuple(p.eval(x) for p in self.components)

    def verify(self) -> bool:
        """Re-check xi_M contracted into omega plus d Phi^xi = 0, per generator."""
        if self.action is None:
            return True
        fields = infinitesimal_generators(self.action)
        w = self.omega.as_form()
        for xi, phi in zip(fields, self.components):
            lhs = interior_product(xi, w) + exterior_d(DifferentialForm.from_function(phi))
            if not lhs.is_zero():
                return False
        return True

    def __repr__(self):
        comps = ", ".join(p.to_string() for p in self.components)
        return f"MomentumMap({comps})"


def derive_momentum_map(action, omega: SymplecticForm) -> MomentumMap:
    """Integrate -xi_M . omega exactly into quadratic components with Phi(0) = 0.

    Finite actions have a trivial Lie algebra, so the map is identically
    zero.  A non-closed contraction means the linear action is not
    symplectic for this omega and is an error.
    """
    if action.kind == "finite":
        return MomentumMap(omega, [], action=action)
    n = omega.nvars
    if action.nvars != n:
        raise ValueError("action/symplectic dimension mismatch")
    components = []
    for xi in infinitesimal_generators(action):
        # rho_j = -(xi . omega)_j = -sum_i xi^i omega_{ij}
        rho = []
        for j in range(n):
            total = Polynomial.zero(n)
            for i in range(n):
                if omega.matrix[i][j] != 0:
                    total = total + xi.components[i] * omega.matrix[i][j]
            rho.append(-total)
        for i in range(n):
            for j in range(n):
                if rho[j].diff(i) != rho[i].diff(j):
                    raise ValueError(
                        "contraction is not closed: the action is not symplectic "
                        "for this form"
                    )
        phi = Polynomial.zero(n)
        for j in range(n):
            phi = phi + Polynomial.variable(n, j) * rho[j]
        phi = phi * Fraction(1, 2)
        components.append(phi)
    result = MomentumMap(omega, components, action=action)
    if not result.verify():
        raise AssertionError("momentum identity failed after integration")
    return result


def zero_level(phi: MomentumMap, var_names=None, name: str = "zero-level") -> SpaceDef:
    """The zero set of the momentum map as a space, with invariance checked.

    The components are sums/differences of squares and need not be
    real-radical generators; tangent computations against this description
    follow the generators, membership follows the point set.
    """
    n = phi.nvars
    equations = [p for p in phi.components if not p.is_zero()]
    space = SpaceDef(
        n,
        var_names=var_names,
        equations=equations,
        sample_points=[tuple(Fraction(0) for _ in range(n))],
        name=name,
    )
    if phi.action is not None and phi.action.kind == "torus":
        for xi in infinitesimal_generators(phi.action):
            for p in equations:
                if not xi.apply_to(p).is_zero():
                    raise ValueError("zero level is not invariant under the action")
    return space


@dataclass
class ReducedStrata:
    stratification: Stratification
    quotient_points: dict = field(default_factory=dict)  # label -> image of sample


def reduced_strata(action, z_space: SpaceDef, hm: Optional[HilbertMap] = None) -> ReducedStrata:
    """Orbit-type partition restricted to the zero level.

    When a Hilbert map is supplied, each stratum's sample is pushed to the
    quotient side so the strata can be located in the embedded quotient.
    """
    strat = orbit_type_partition(action, z_space)
    images = {}
    if hm is not None:
        for s in strat.strata:
            if s.sample is not None:
                images[s.label] = hm.apply(s.sample)
    return ReducedStrata(strat, images)


def poisson_bracket(omega: SymplecticForm, f, g) -> RationalFunction:
    """{f, g} = omega(X_f, X_g), exact; antisymmetric, Leibniz, Jacobi."""
    n = omega.nvars
    fr = f if isinstance(f, RationalFunction) else RationalFunction(f)
    gr = g if isinstance(g, RationalFunction) else RationalFunction(g)
    inv = omega.inverse()
    total = RationalFunction.zero(n)
    for i in range(n):
        dfi = fr.diff(i)
        if dfi.is_zero():
            continue
        for j in range(n):
            if inv[i][j] == 0:
                continue
            dgj = gr.diff(j)
            if dgj.is_zero():
                continue
            total = total - dfi * dgj * inv[i][j]
    return total


@dataclass
class SjamaarVerdict:
    verified: bool
    invariant: bool
    details: list

    @property
    def ok(self):
        return self.verified and self.invariant


def check_sjamaar(
    action,
    hm: HilbertMap,
    principal_stratum: StratumParam,
    sigma: DifferentialForm,
    alpha: DifferentialForm,
) -> SjamaarVerdict:
    """Verify a quotient form against its claimed global extension.

    Composes both sides with the principal-stratum parametrization c:
    pullback(c, alpha) must equal pullback(hm . c, sigma) exactly, and alpha
    must be invariant.  A sigma denominator vanishing identically on the
    image of the stratum is an error.
    """
    details = []
    c_map = PolyMap(principal_stratum.domain_dim, principal_stratum.mapping)
    if alpha.nvars != c_map.target_nvars:
        raise ValueError("alpha must live on the ambient space of the stratum")
    if sigma.nvars != hm.target_nvars:
        raise ValueError("sigma must live on the Hilbert-map target")
    quotient_map = PolyMap(
        principal_stratum.domain_dim,
        [p.compose(principal_stratum.mapping) for p in hm.generators],
    )
    try:
        rhs = pullback(quotient_map, sigma)
    except ZeroDivisionError as exc:
        raise ZeroDivisionError(
            f"sigma denominator vanishes on the principal stratum image: {exc}"
        ) from exc
    lhs = pullback(c_map, alpha)
    verified = lhs == rhs
    if not verified:
        details.append(
            f"pullbacks differ: stratum side {lhs.to_string()}, quotient side {rhs.to_string()}"
        )
    inv = is_invariant(action, alpha)
    if inv.holds is not True:
        details.append("alpha is not invariant")
    return SjamaarVerdict(verified, inv.holds is True, details)
