"""Derivations and vector fields on subcartesian spaces.

A derivation is an ambient polynomial field X = sum a_i d/dx_i restricted to
a space.  It is *admissible* when it maps the equation ideal into itself
(checked by exact normal-form reduction), and it is a genuine *vector field*
when its maximal integral curves assemble into a local flow with open
domain.  The latter is undecidable from a finite description, so
classification here is probe-based: verdicts carry the probes used.

Numerical flows are adaptive embedded Runge-Kutta 4(5) on the ambient field
with optional Newton projection back onto the equation set.
"""

from __future__ import annotations

import os
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import rlinalg
from ._kernels import PolySystem
from .diffspace import GE, GT, SpaceDef, orbital_tangent
from .polyalg import Polynomial, normal_form

__all__ = [
    "Derivation",
    "AdmissibilityVerdict",
    "FlowParams",
    "FlowResult",
    "Classification",
    "PushforwardResult",
    "CompletenessReport",
    "OrbitParams",
    "OrbitApprox",
    "InadmissibleFieldError",
    "FlowUndefinedError",
    "is_admissible",
    "classify",
    "flow",
    "polynomial_flow_map",
    "pushforward_along_flow",
    "check_local_completeness",
    "orbit_explore",
]


class InadmissibleFieldError(ValueError):
    pass


def _point_str(x) -> str:
    return "(" + ", ".join(str(v) if isinstance(v, (int, Fraction)) else f"{v:.6g}" for v in x) + ")"


class FlowUndefinedError(RuntimeError):
    pass


class Derivation:
    """An ambient polynomial vector field, one component per coordinate."""

    def __init__(self, components: Sequence[Polynomial], name: Optional[str] = None):
        self.components = list(components)
        if not self.components:
            raise ValueError("derivation needs at least one component")
        n = self.components[0].nvars
        for c in self.components:
            if c.nvars != n:
                raise ValueError("component nvars mismatch")
        if len(self.components) != n:
            raise ValueError(
                f"derivation has {len(self.components)} components for {n} variables"
            )
        self.nvars = n
        self.name = name
        self._admissibility = {}
        self._system = None

    @classmethod
    def from_strings(cls, texts, var_names, name=None):
        from .polyalg import parse_polynomial

        return cls([parse_polynomial(t, var_names) for t in texts], name=name)

    @classmethod
    def coordinate(cls, nvars: int, i: int, name=None):
        comps = [Polynomial.zero(nvars) for _ in range(nvars)]
        comps[i] = Polynomial.constant(nvars, 1)
        return cls(comps, name=name or f"d{i}")

    def value_at(self, x):
        return tuple(c.eval(x) for c in self.components)

    def apply_to(self, f: Polynomial) -> Polynomial:
        """X(f) = sum_i a_i df/dx_i, exact."""
        total = Polynomial.zero(self.nvars)
        for i, a in enumerate(self.components):
            total = total + a * f.diff(i)
        return total

    def system(self) -> PolySystem:
        if self._system is None:
            self._system = PolySystem(self.components)
        return self._system

    def __add__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return Derivation([a + b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return Derivation([-a for a in self.components])

    def __sub__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self + (-other)

    def scale(self, h) -> "Derivation":
        """Multiply by a polynomial or scalar."""
        return Derivation([a * h if isinstance(h, (int, Fraction)) else h * a for a in self.components])

    def bracket(self, other: "Derivation") -> "Derivation":
        """Commutator [X, Y]_j = X(Y_j) - Y(X_j), exact."""
        comps = [
            self.apply_to(yj) - other.apply_to(xj)
            for xj, yj in zip(self.components, other.components)
        ]
        return Derivation(comps)

    def to_string(self, var_names=None) -> str:
        return "(" + ", ".join(c.to_string(var_names) for c in self.components) + ")"

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"Derivation{label}{self.to_string()}"


@dataclass
class AdmissibilityVerdict:
    admissible: Optional[bool]
    certainty: str  # "symbolic" or "numeric"
    details: list

    def __bool__(self):
        return self.admissible is True


def is_admissible(
    space: SpaceDef, X: Derivation, numeric_tol: float = 1e-9
) -> AdmissibilityVerdict:
    """Does X map the equation ideal into itself?

    For each equation generator f, X(f) is reduced by normal-form division
    against the equation list.  All-zero remainders give a certain yes; a
    nonzero remainder against a Groebner generator list gives a certain no.
    Otherwise the verdict falls back to exact evaluation of X(f) at the
    space's rational sample points (a nonzero value there is still a certain
    no) and is tagged "numeric" when only that evidence supports it.
    """
    cached = X._admissibility.get(id(space))
    if cached is not None:
        ref, verdict = cached
        if ref() is space:
            return verdict
    if X.nvars != space.nvars:
        raise ValueError("derivation/space dimension mismatch")
    details = []
    verdict = None
    if not space.equations:
        verdict = AdmissibilityVerdict(True, "symbolic", ["no equation constraints"])
    else:
        inconclusive = []
        for f in space.equations:
            xf = X.apply_to(f)
            nf = normal_form(xf, space.equations, assume_groebner=space.equations_groebner)
            if nf.certainty == "certain-member":
                details.append((f, "member"))
            elif nf.certainty == "certain-nonmember":
                verdict = AdmissibilityVerdict(
                    False, "symbolic", [f"X(f) not in ideal for f={f.to_string(space.var_names)}"]
                )
                break
            else:
                inconclusive.append((f, xf))
        if verdict is None and not inconclusive:
            verdict = AdmissibilityVerdict(True, "symbolic", ["all X(f) reduce to 0"])
        if verdict is None:
            samples = list(space.sample_points)
            for stratum in space.strata:
                samples.extend(stratum.ambient_samples())
            exact_counterexample = None
            for f, xf in inconclusive:
                for s in samples:
                    v = xf.eval(s)
                    if isinstance(v, Fraction):
                        if v != 0:
                            exact_counterexample = (f, s, v)
                            break
                    elif abs(v) > numeric_tol:
                        exact_counterexample = (f, s, v)
                        break
                if exact_counterexample:
                    break
            if exact_counterexample:
                f, s, v = exact_counterexample
                verdict = AdmissibilityVerdict(
                    False,
                    "symbolic" if isinstance(v, Fraction) else "numeric",
                    [f"X(f)({s}) = {v} != 0 on the space"],
                )
            else:
                verdict = AdmissibilityVerdict(
                    True,
                    "numeric",
                    [
                        "ideal membership inconclusive (generators not a Groebner basis); "
                        f"X(f) vanishes at all {len(samples)} sample points"
                    ],
                )
    X._admissibility[id(space)] = (weakref.ref(space), verdict)
    return verdict


# -- numerical flows -----------------------------------------------------------

# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)

_BLOWUP_NORM = 1e8
_MIN_STEP = 1e-12


@dataclass
class FlowParams:
    step: float = 0.1  # initial step size
    tol: float = 1e-10  # local error tolerance (absolute and relative)
    project: bool = True  # Newton-project onto the equation set after each step
    contains_tol: float = 1e-7
    record: bool = True


@dataclass
class FlowResult:
    """A numerically integrated trajectory with its terminal status.

    trajectory times are strictly increasing; for backward flows they run
    from t_end up to 0.  drift_max is the worst equation residual seen.
    """

    trajectory: list
    terminal_status: str  # completed | left_set | blow_up | stalled
    drift_max: float
    t_requested: float
    t_reached: float
    exit_constraint: Optional[tuple] = None  # (index, relation) for left_set

    @property
    def end_point(self):
        if self.t_requested < 0:
            return self.trajectory[0][1]
        return self.trajectory[-1][1]

    @property
    def end_time(self):
        if self.t_requested < 0:
            return self.trajectory[0][0]
        return self.trajectory[-1][0]


def _rk45_step(fe, x, h):
    k = [fe(x)]
    for i in range(1, 7):
        xi = x + h * sum(a * kk for a, kk in zip(_DP_A[i], k))
        k.append(fe(xi))
    x5 = x + h * sum(b * kk for b, kk in zip(_DP_B5, k))
    x4 = x + h * sum(b * kk for b, kk in zip(_DP_B4, k))
    return x5, x5 - x4


def _error_norm(err, x, x_new, tol):
    scale = tol + tol * np.maximum(np.abs(x), np.abs(x_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _newton_project(eq_sys, eq_jac, x, max_iter=5, residual_tol=1e-12):
    """Orthogonal Newton projection onto the equation zero set."""
    drift = float(np.max(np.abs(eq_sys.eval(x)))) if eq_sys.ncomp else 0.0
    for _ in range(max_iter):
        r = eq_sys.eval(x)
        if float(np.max(np.abs(r))) <= residual_tol:
            break
        j = eq_jac_matrix(eq_jac, x)
        dx, *_ = np.linalg.lstsq(j, -r, rcond=None)
        x = x + dx
    return x, drift


def eq_jac_matrix(eq_sys: PolySystem, x):
    return eq_sys.jacobian_at(x)


def _violated_constraint(space: SpaceDef, x, eps=1e-12):
    for idx, (g, rel) in enumerate(space.inequalities):
        v = g.eval([float(c) for c in x])
        if rel == GE and v < -eps:
            return idx, rel
        if rel == GT and v <= 0:
            return idx, rel
    if space.pieces:
        pt = [float(c) for c in x]
        if not any(piece.satisfied(pt, 1e-9) for piece in space.pieces):
            return None, "piece"
    return None


def flow(
    space: SpaceDef,
    X: Derivation,
    x0,
    t_end: float,
    params: Optional[FlowParams] = None,
) -> FlowResult:
    """Integrate the flow of X on the space from x0 over [0, t_end].

    Adaptive RK4(5) on the ambient field; after each accepted step the point
    is optionally Newton-projected back onto the equation set.  Crossing a
    declared inequality stops the flow, with the exit time located by
    bisection to 1e-9.
    """
    params = params or FlowParams()
    verdict = is_admissible(space, X)
    if verdict.admissible is False:
        raise InadmissibleFieldError(f"{X} is not admissible on {space.name!r}")
    x0f = np.asarray([float(v) for v in x0], dtype=np.float64)
    if not space.contains([float(v) for v in x0], max(params.contains_tol, 1e-12)):
        raise ValueError(f"flow start {tuple(x0)} is not on space {space.name!r}")

    direction = 1.0 if t_end >= 0 else -1.0
    duration = abs(float(t_end))
    sys = X.system()
    eq_sys = PolySystem(space.equations) if space.equations else None

    def fe(x):
        return direction * sys.eval(x)

    points = [(0.0, tuple(x0f))]
    drift_max = float(np.max(np.abs(eq_sys.eval(x0f)))) if eq_sys else 0.0
    status = "completed"
    exit_constraint = None
    t = 0.0
    x = x0f
    h = min(params.step, duration) if duration > 0 else params.step

    while t < duration - 1e-15 and duration > 0:
        h = min(h, duration - t)
        if h < _MIN_STEP:
            status = "stalled"
            break
        x_new, err = _rk45_step(fe, x, h)
        if not np.all(np.isfinite(x_new)):
            h *= 0.5
            continue
        enorm = _error_norm(err, x, x_new, params.tol)
        if enorm > 1.0:
            h *= max(0.2, 0.9 * enorm ** (-0.2))
            continue
        accepted_h = h
        if enorm > 0:
            h *= min(5.0, max(0.2, 0.9 * enorm ** (-0.2)))
        else:
            h *= 5.0
        if params.project and eq_sys is not None:
            x_new, drift = _newton_project(eq_sys, eq_sys, x_new)
            drift_max = max(drift_max, drift)
        hit = _violated_constraint(space, x_new)
        if hit is not None:
            # bisect the step length to locate the exit within 1e-9
            lo, hi = 0.0, accepted_h
            x_lo = x
            while hi - lo > 1e-9:
                mid = 0.5 * (lo + hi)
                x_mid, _ = _rk45_step(fe, x, mid)
                if params.project and eq_sys is not None:
                    x_mid, _ = _newton_project(eq_sys, eq_sys, x_mid)
                if _violated_constraint(space, x_mid) is None:
                    lo, x_lo = mid, x_mid
                else:
                    hi = mid
            t = t + lo
            x = x_lo
            points.append((direction * t, tuple(x)))
            status = "left_set"
            exit_constraint = hit
            break
        t += accepted_h
        x = x_new
        if eq_sys is not None:
            drift_max = max(drift_max, float(np.max(np.abs(eq_sys.eval(x)))))
        if params.record:
            points.append((direction * t, tuple(x)))
        if float(np.max(np.abs(x))) > _BLOWUP_NORM:
            status = "blow_up"
            break
    if not params.record and (not points or points[-1][0] != direction * t):
        points.append((direction * t, tuple(x)))
    if direction < 0:
        points = points[::-1]
    return FlowResult(
        trajectory=points,
        terminal_status=status,
        drift_max=drift_max,
        t_requested=float(t_end),
        t_reached=direction * t,
        exit_constraint=exit_constraint,
    )


def _flow_ambient(X: Derivation, x0, t_end: float, tol: float = 1e-12):
    """Flow of the ambient field, ignoring all space constraints."""
    sys = X.system()
    direction = 1.0 if t_end >= 0 else -1.0
    duration = abs(float(t_end))
    x = np.asarray([float(v) for v in x0], dtype=np.float64)

    def fe(p):
        return direction * sys.eval(p)

    t = 0.0
    h = min(0.1, duration) if duration > 0 else 0.1
    while t < duration - 1e-15:
        h = min(h, duration - t)
        if h < _MIN_STEP:
            raise FlowUndefinedError("ambient flow stalled")
        x_new, err = _rk45_step(fe, x, h)
        if not np.all(np.isfinite(x_new)):
            h *= 0.5
            continue
        enorm = _error_norm(err, x, x_new, tol)
        if enorm > 1.0:
            h *= max(0.2, 0.9 * enorm ** (-0.2))
            continue
        t += h
        x = x_new
        h *= min(5.0, max(0.2, 0.9 * enorm ** (-0.2))) if enorm > 0 else 5.0
        if float(np.max(np.abs(x))) > _BLOWUP_NORM:
            raise FlowUndefinedError(f"ambient flow of {X} blows up before t={t_end}")
    return x


# -- classification ---------------------------------------------------------------


@dataclass
class Classification:
    kind: str  # VectorField | DerivationOnly | Unknown
    reason: str
    probes: list = field(default_factory=list)

    def __str__(self):
        return self.kind


def _default_probes(space: SpaceDef):
    probes = list(space.sample_points)
    for stratum in space.strata:
        for p in stratum.ambient_samples():
            if space.contains(p) and p not in probes:
                probes.append(p)
    return probes


def classify(
    space: SpaceDef,
    X: Derivation,
    probes=None,
    t_window: float = 1.0,
    params: Optional[FlowParams] = None,
) -> Classification:
    """Probe-based classification of an admissible derivation.

    Unknown when the space is not known to be locally compact (the
    open-domain criterion is only valid there).  DerivationOnly when a probe
    on an active closed boundary has nonzero normal velocity, or when a
    trajectory exits through a closed inequality at finite time.  VectorField
    when every probe trajectory runs the full window or leaves every compact
    region.  The verdict carries the probe list.
    """
    verdict = is_admissible(space, X)
    if verdict.admissible is False:
        raise InadmissibleFieldError(f"{X} is not admissible on {space.name!r}")
    if space.locally_compact is not True:
        return Classification(
            "Unknown",
            "space has a strict inequality in its description: local compactness "
            "unknown, so the open-domain criterion does not apply",
            probes=list(probes or []),
        )
    probes = list(probes) if probes is not None else _default_probes(space)
    params = params or FlowParams()
    for probe in probes:
        exact_probe = all(isinstance(v, (int, Fraction)) for v in probe)
        actives = space.active_inequalities(probe, tol=0.0 if exact_probe else 1e-12)
        for idx in actives:
            g, rel = space.inequalities[idx]
            if rel != GE:
                continue
            grad = [g.diff(i).eval(probe) for i in range(space.nvars)]
            vel = X.value_at(probe)
            pairing = sum(gi * vi for gi, vi in zip(grad, vel))
            blocked = pairing != 0 if exact_probe else abs(pairing) > 1e-9
            if blocked:
                side = "backward" if pairing > 0 else "forward"
                return Classification(
                    "DerivationOnly",
                    f"probe {_point_str(probe)} sits on the boundary {{{g.to_string(space.var_names)} = 0}} "
                    f"with nonzero normal velocity: the {side} integral curve is blocked, "
                    "so its maximal domain is not open",
                    probes=probes,
                )
        for t_dir in (t_window, -t_window):
            res = flow(space, X, probe, t_dir, params)
            if res.terminal_status == "left_set":
                idx, rel = res.exit_constraint
                if rel == "piece":
                    return Classification(
                        "DerivationOnly",
                        f"trajectory from probe {_point_str(probe)} leaves the closed union "
                        f"of pieces at finite time {res.t_reached:.6g}",
                        probes=probes,
                    )
                g, _ = space.inequalities[idx]
                if rel == GE:
                    return Classification(
                        "DerivationOnly",
                        f"trajectory from probe {_point_str(probe)} exits through the closed "
                        f"boundary {{{g.to_string(space.var_names)} >= 0}} at finite time "
                        f"{res.t_reached:.6g}",
                        probes=probes,
                    )
            elif res.terminal_status == "stalled":
                return Classification(
                    "Unknown",
                    f"integration stalled from probe {_point_str(probe)}",
                    probes=probes,
                )
    return Classification(
        "VectorField",
        f"all probe trajectories over [-{t_window}, {t_window}] remain in the set "
        "or leave every compact region",
        probes=probes,
    )


# -- pushforwards and local completeness ----------------------------------------


def polynomial_flow_map(X: Derivation, t, max_order: int = 16):
    """Exact polynomial flow map of X at rational time t, or None.

    Sums the series sum_k t^k/k! X^k(coordinates); this terminates exactly
    when repeated application of X to the coordinates reaches zero (nilpotent
    behaviour), which covers fields like upper-triangular linear parts.
    """
    if not isinstance(t, (int, Fraction)):
        return None
    t = Fraction(t)
    n = X.nvars
    coords = [Polynomial.variable(n, i) for i in range(n)]
    total = list(coords)
    current = coords
    factorial = Fraction(1)
    for k in range(1, max_order + 1):
        current = [X.apply_to(c) for c in current]
        if all(c.is_zero() for c in current):
            return total
        factorial *= k
        coeff = t**k / factorial
        total = [tot + c * coeff for tot, c in zip(total, current)]
    return None


@dataclass
class PushforwardResult:
    value: tuple  # vector at x (exact Fractions when available, floats otherwise)
    exact_field: Optional[Derivation]  # full pushforward derivation when X has a polynomial flow
    method: str  # "exact" or "numeric"


def pushforward_exact(X: Derivation, Y: Derivation, t) -> Optional[Derivation]:
    forward = polynomial_flow_map(X, t)
    if forward is None:
        return None
    backward = polynomial_flow_map(X, -t)
    if backward is None:
        return None
    n = X.nvars
    jac = [[forward[j].diff(i) for i in range(n)] for j in range(n)]
    comps = []
    y_pulled = [c.compose(backward) for c in Y.components]
    for j in range(n):
        total = Polynomial.zero(n)
        for i in range(n):
            total = total + jac[j][i].compose(backward) * y_pulled[i]
        comps.append(total)
    return Derivation(comps)


def pushforward_along_flow(
    space: SpaceDef,
    X: Derivation,
    Y: Derivation,
    t,
    x,
    h: float = 1e-5,
) -> PushforwardResult:
    """(exp(tX)_* Y)|_x, exactly when X has a polynomial flow map, else numerically.

    The numeric path uses central finite differences of the integrated flow
    map, Richardson-extrapolated once (h and h/2).
    """
    if float(t) == 0.0:
        return PushforwardResult(Y.value_at(x), Y, "exact")
    exact = pushforward_exact(X, Y, t)
    if exact is not None:
        return PushforwardResult(exact.value_at(x), exact, "exact")
    tf = float(t)
    y = _flow_ambient(X, x, -tf)
    v = np.asarray([float(c) for c in Y.value_at(y)])
    n = X.nvars

    def jac_fd(step):
        cols = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = step
            plus = _flow_ambient(X, y + e, tf)
            minus = _flow_ambient(X, y - e, tf)
            cols.append((plus - minus) / (2 * step))
        return np.column_stack(cols)

    j_h = jac_fd(h)
    j_h2 = jac_fd(h / 2)
    jac = (4 * j_h2 - j_h) / 3
    return PushforwardResult(tuple(jac @ v), None, "numeric")


@dataclass
class CompletenessReport:
    verdict: str  # "violated (witness)" or "consistent on probes"
    witnesses: list
    checks: int

    @property
    def violated(self):
        return bool(self.witnesses)


def check_local_completeness(
    space: SpaceDef,
    family: Sequence[Derivation],
    probe_points,
    probe_times=(Fraction(1), Fraction(1, 2)),
    tol: float = 1e-6,
) -> CompletenessReport:
    """Refutation-capable probe of local completeness.

    For each ordered pair (X, Y), time t and probe x, the pushforward
    (exp(tX)_* Y)|_x must lie in span{Z|_x : Z in family}.  Exact span tests
    are used whenever the pushforward is exact and the probe rational;
    otherwise a least-squares residual at the stated tolerance.  A failure is
    a witness of non-completeness; absence of failures is only consistency.
    """
    for Z in family:
        verdict = is_admissible(space, Z)
        if verdict.admissible is False:
            raise InadmissibleFieldError(f"{Z} is not admissible on {space.name!r}")
    witnesses = []
    checks = 0
    for X in family:
        for Y in family:
            for t in probe_times:
                for x in probe_points:
                    checks += 1
                    result = pushforward_along_flow(space, X, Y, t, x)
                    span_vectors = [Z.value_at(x) for Z in family]
                    exact_point = all(isinstance(c, (int, Fraction)) for c in x)
                    if result.method == "exact" and exact_point:
                        inside = rlinalg.span_contains(span_vectors, result.value)
                    else:
                        a = np.asarray(
                            [[float(c) for c in v] for v in span_vectors]
                        ).T
                        b = np.asarray([float(c) for c in result.value])
                        if a.size:
                            coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
                            residual = float(np.linalg.norm(a @ coeffs - b))
                        else:
                            residual = float(np.linalg.norm(b))
                        inside = residual <= tol
                    if not inside:
                        witnesses.append(
                            {
                                "X": X,
                                "Y": Y,
                                "t": t,
                                "point": tuple(x),
                                "value": result.value,
                                "pushforward": result.exact_field,
                                "method": result.method,
                            }
                        )
    verdict = "violated (witness)" if witnesses else "consistent on probes"
    return CompletenessReport(verdict, witnesses, checks)


# -- orbit exploration ---------------------------------------------------------


@dataclass
class OrbitParams:
    time_grid: tuple = (0.1, -0.1, 0.5, -0.5, 1.0, -1.0)
    depth: int = 4
    dedup_radius: float = 1e-3
    max_points: int = 200
    contains_tol: float = 1e-6
    rank_tol: float = 1e-8
    flow: FlowParams = field(default_factory=lambda: FlowParams(record=False))


@dataclass
class OrbitApprox:
    seed: tuple
    points: list  # deduplicated cloud, floats
    est_dim: int
    tangent_rank_along: list  # (point, delta) pairs
    drift_max: float

    def __len__(self):
        return len(self.points)


def orbit_explore(
    space: SpaceDef,
    family: Sequence[Derivation],
    seed,
    params: Optional[OrbitParams] = None,
) -> OrbitApprox:
    """Breadth-first composition of family flows from a seed point.

    The cloud is deduplicated within dedup_radius; est_dim is the maximal
    orbital tangent rank over the cloud.  For a locally complete family the
    Orbit Theorem makes the orbit a manifold, so est_dim must match the
    orbital dimension at the seed; the acceptance suite checks exactly that.
    Frontier expansion parallelizes across STRATLAB_THREADS workers, with the
    shared cloud updated only in the merge step.
    """
    params = params or OrbitParams()
    for Z in family:
        verdict = is_admissible(space, Z)
        if verdict.admissible is False:
            raise InadmissibleFieldError(f"{Z} is not admissible on {space.name!r}")
    seed_t = tuple(seed)
    if not space.contains([float(v) for v in seed_t], params.contains_tol):
        raise ValueError(f"seed {seed_t} is not on space {space.name!r}")

    cloud = [np.asarray([float(v) for v in seed_t])]
    frontier = [cloud[0]]
    drift_max = 0.0
    threads = int(os.environ.get("STRATLAB_THREADS", "1") or "1")

    def expand(x):
        out = []
        local_drift = 0.0
        for X in family:
            for t in params.time_grid:
                res = flow(space, X, x, t, params.flow)
                local_drift = max(local_drift, res.drift_max)
                if res.terminal_status != "completed":
                    continue
                y = np.asarray(res.end_point)
                if space.contains(y, params.contains_tol):
                    out.append(y)
        return out, local_drift

    for _ in range(params.depth):
        if not frontier or len(cloud) >= params.max_points:
            break
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                batches = list(pool.map(expand, frontier))
        else:
            batches = [expand(x) for x in frontier]
        new_frontier = []
        for batch, local_drift in batches:
            drift_max = max(drift_max, local_drift)
            for y in batch:
                if len(cloud) >= params.max_points:
                    break
                dmin = min(float(np.max(np.abs(y - c))) for c in cloud)
                if dmin > params.dedup_radius:
                    cloud.append(y)
                    new_frontier.append(y)
        frontier = new_frontier

    ranks = []
    exact_seed = all(isinstance(v, (int, Fraction)) for v in seed_t)
    for i, p in enumerate(cloud):
        if i == 0 and exact_seed:
            ts = orbital_tangent(space, family, seed_t, params.rank_tol)
        else:
            ts = orbital_tangent(space, family, tuple(p), params.rank_tol)
        ranks.append((tuple(float(v) for v in p), ts.dim))
    est_dim = max(r for _, r in ranks) if ranks else 0
    return OrbitApprox(
        seed=seed_t,
        points=[tuple(float(v) for v in p) for p in cloud],
        est_dim=est_dim,
        tangent_rank_along=ranks,
        drift_max=drift_max,
    )
