"""Built-in regression gallery: the worked examples the library reproduces.

Each entry returns (ok, detail).  The CLI `gallery` subcommand runs all of
them and exits nonzero if any fails; they double as an end-to-end smoke
test of every subsystem against independently known answers.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .actions import (
    FiniteGroupAction,
    HilbertMap,
    TorusAction,
    hilbert_embed,
    orbit_type_partition,
    stabilizer,
    verify_invariant_gens,
)
from .diffspace import GE, GT, Piece, SpaceDef, StratumParam, delta_profile, zariski_tangent
from .fields import (
    Derivation,
    check_local_completeness,
    classify,
    flow,
    orbit_explore,
    pushforward_along_flow,
)
from .forms import DifferentialForm, PolyMap, find_descent_witness, is_basic, pullback
from .hamiltonian import (
    SymplecticForm,
    check_sjamaar,
    derive_momentum_map,
    hamiltonian_vector_field,
    poisson_bracket,
    zero_level,
)
from .polyalg import Polynomial, parse_polynomial, parse_rational_function


def _plane():
    return SpaceDef(2, ["x", "y"], name="plane")


def _cone_space():
    s, t, u = Polynomial.variables(3)
    return SpaceDef(
        3,
        ["s", "t", "u"],
        equations=[s**2 + t**2 - u**2],
        inequalities=[(u, GE)],
        sample_points=[(0, 0, 0), (3, 4, 5)],
        name="cone",
    )


def _cone_map():
    x, y = Polynomial.variables(2)
    return HilbertMap(
        [x**2 - y**2, 2 * x * y, x**2 + y**2],
        target_names=["s", "t", "u"],
        relations=[parse_polynomial("s^2 + t^2 - u^2", ["s", "t", "u"])],
    )


def entry_zariski_dims():
    x, y = Polynomial.variables(2)
    three_lines = SpaceDef(2, ["x", "y"], equations=[x * y * (x - y)], name="threelines")
    d1 = zariski_tangent(three_lines, (0, 0)).dim
    a, b, c = Polynomial.variables(3)
    axes = SpaceDef(3, ["x", "y", "z"], equations=[a * b, b * c, c * a], name="axes")
    d2 = zariski_tangent(axes, (0, 0, 0)).dim
    circle = SpaceDef(2, ["x", "y"], equations=[x**2 + y**2 - 1], sample_points=[(1, 0)])
    d3 = zariski_tangent(circle, (1, 0)).dim
    ok = (d1, d2, d3) == (2, 3, 1) and d1 != d2
    return ok, f"three-lines dim {d1}, axes dim {d2}, circle dim {d3}"


def entry_cone_pullback():
    hm = _cone_map()
    sigma = DifferentialForm(
        3, 2, {(0, 1): parse_rational_function("1/(4*u)", ["s", "t", "u"])}
    )
    pulled = pullback(PolyMap(2, hm.generators), sigma)
    target = DifferentialForm(2, 2, {(0, 1): 1})
    ok = pulled == target
    return ok, f"pullback of (1/(4u)) ds^dt = {pulled.to_string(['x', 'y'])}"


def entry_sjamaar():
    hm = _cone_map()
    z2 = FiniteGroupAction.minus_identity(2)
    a, b = Polynomial.variables(2)
    principal = StratumParam(
        "principal",
        2,
        [Polynomial.variable(2, 0), Polynomial.variable(2, 1)],
        open_constraints=[(a**2 + b**2, GT)],
    )
    sigma = DifferentialForm(
        3, 2, {(0, 1): parse_rational_function("1/(4*u)", ["s", "t", "u"])}
    )
    alpha = DifferentialForm(2, 2, {(0, 1): 1})
    verdict = check_sjamaar(z2, hm, principal, sigma, alpha)
    bad_sigma = DifferentialForm(3, 1, {(0,): 1})
    bad_alpha = DifferentialForm(2, 1, {(0,): 1})
    rejected = not check_sjamaar(z2, hm, principal, bad_sigma, bad_alpha).verified
    ok = verdict.ok and rejected
    return ok, f"cone pair verified={verdict.ok}, ds-vs-dx rejected={rejected}"


def entry_hilbert_embedding():
    hm = _cone_map()
    z2 = FiniteGroupAction.minus_identity(2)
    samples = [
        (Fraction(1), Fraction(1)),
        (Fraction(-1), Fraction(-1)),
        (Fraction(2), Fraction(0)),
        (Fraction(0), Fraction(-2)),
        (Fraction(1, 2), Fraction(-1, 3)),
    ]
    report = hilbert_embed(z2, hm, samples)
    image_11 = hm.apply((Fraction(1), Fraction(1)))
    orthant = all(v[2] >= 0 for v in report.images)
    ok = (
        report.ok
        and report.separation == "verified"
        and image_11 == (0, 2, 2)
        and orthant
    )
    return ok, f"image of (1,1) = {image_11}, separation {report.separation}"


def entry_orthant_images():
    n = 3
    group = FiniteGroupAction.sign_flips(n)
    gens = [Polynomial.variable(n, i) ** 2 for i in range(n)]
    hm = HilbertMap(gens)
    verdict = verify_invariant_gens(group, gens)
    samples = [
        (Fraction(1), Fraction(-2), Fraction(3)),
        (Fraction(-1, 2), Fraction(5), Fraction(-7)),
    ]
    report = hilbert_embed(group, hm, samples)
    in_orthant = all(all(c >= 0 for c in img) for img in report.images)
    ok = verdict.all_invariant and in_orthant and report.ok
    return ok, f"squares invariant={verdict.all_invariant}, images in orthant={in_orthant}"


def entry_classification():
    x1 = Polynomial.variable(1, 0)
    halfline = SpaceDef(1, ["x"], inequalities=[(x1, GE)], name="halfline")
    dx = Derivation([Polynomial.constant(1, 1)], name="dx")
    k1 = classify(halfline, dx).kind
    line = SpaceDef(1, ["x"], name="line")
    r1 = classify(line, dx).kind
    x, y = Polynomial.variables(2)
    disc_plus_line = SpaceDef(
        2,
        ["x", "y"],
        pieces=[
            Piece(inequalities=[(1 - (x**2 + (y - 1) ** 2), GT)]),
            Piece(equations=[y]),
        ],
        sample_points=[(0, 0)],
        name="disc-plus-line",
    )
    dx2 = Derivation([Polynomial.constant(2, 1), Polynomial.zero(2)], name="dx")
    s1 = classify(disc_plus_line, dx2).kind
    ok = (k1, r1, s1) == ("DerivationOnly", "VectorField", "Unknown")
    return ok, f"half-line {k1}, line {r1}, disc-plus-line {s1}"


def entry_local_completeness():
    plane = _plane()
    x, y = Polynomial.variables(2)
    dx = Derivation([Polynomial.constant(2, 1), Polynomial.zero(2)], name="dx")
    xdy = Derivation([Polynomial.zero(2), x], name="x*dy")
    report = check_local_completeness(
        plane, [dx, xdy], [(Fraction(0), Fraction(2))], [Fraction(1)]
    )
    witness_ok = False
    for w in report.witnesses:
        if w["pushforward"] is not None and w["value"] == (Fraction(1), Fraction(1)):
            witness_ok = True
    const = check_local_completeness(
        plane,
        [dx, Derivation([Polynomial.zero(2), Polynomial.constant(2, 1)], name="dy")],
        [(Fraction(0), Fraction(2)), (Fraction(1), Fraction(-1))],
        [Fraction(1)],
    )
    rot = Derivation([-y, x], name="rot")
    rad = Derivation([x, y], name="rad")
    rr = check_local_completeness(
        plane, [rot, rad], [(Fraction(1), Fraction(0)), (Fraction(1), Fraction(2))], [Fraction(1)]
    )
    ok = report.violated and witness_ok and not const.violated and not rr.violated
    return ok, (
        f"{{dx, x dy}} {report.verdict} with exact witness (1, 1); "
        f"constants {const.verdict}; rotation+radial {rr.verdict}"
    )


def entry_orbits():
    plane = _plane()
    x, y = Polynomial.variables(2)
    rot = Derivation([-y, x], name="rot")
    rad = Derivation([x, y], name="rad")
    orb = orbit_explore(plane, [rot, rad], (Fraction(1), Fraction(0)))
    consistent = all(r == orb.est_dim for _, r in orb.tangent_rank_along)
    orb0 = orbit_explore(plane, [rot, rad], (Fraction(0), Fraction(0)))
    cone = _cone_space()
    s, t, u = Polynomial.variables(3)
    crot = Derivation([-t, s, Polynomial.zero(3)], name="rot")
    crad = Derivation([s, t, u], name="rad")
    apex = orbit_explore(cone, [crot, crad], (0, 0, 0))
    off = orbit_explore(cone, [crot, crad], (3, 4, 5))
    ok = (
        orb.est_dim == 2
        and consistent
        and len(orb0) == 1
        and orb0.est_dim == 0
        and len(apex) == 1
        and apex.est_dim == 0
        and off.est_dim == 2
        and off.drift_max <= 1e-8
    )
    return ok, (
        f"rotation+radial est_dim {orb.est_dim} (delta consistent: {consistent}); "
        f"origin orbit size {len(orb0)}; cone apex size {len(apex)}, off-apex est_dim {off.est_dim}"
    )


def entry_delta_profile():
    plane = _plane()
    x, _ = Polynomial.variables(2)
    dx = Derivation([Polynomial.constant(2, 1), Polynomial.zero(2)], name="dx")
    xdy = Derivation([Polynomial.zero(2), x], name="x*dy")
    pts = [(Fraction(v, 4), Fraction(0)) for v in range(-4, 5)]
    profile = delta_profile(plane, [dx, xdy], pts)
    ok = all(d == (1 if p[0] == 0 else 2) for p, d in profile)
    return ok, "delta = 1 exactly on the line x = 0, else 2"


def entry_stratifications():
    plane = _plane()
    z2 = FiniteGroupAction.minus_identity(2)
    s1 = orbit_type_partition(z2, plane)
    dims1 = sorted(s.dim for s in s1.strata)
    z22 = FiniteGroupAction.sign_flips(2)
    s2 = orbit_type_partition(z22, plane)
    dims2 = sorted(s.dim for s in s2.strata)
    quadrants = s2.principal()
    circle_action = TorusAction(2, [(0, 1)], [[1]])
    s3 = orbit_type_partition(circle_action, plane)
    dims3 = sorted(s.dim for s in s3.strata)
    principal_open_dense = (
        s1.principal().dim == 2
        and max(s.dim for s in s1.strata if s is not s1.principal()) < 2
        and s2.principal().dim == 2
        and max(s.dim for s in s2.strata if s is not s2.principal()) < 2
    )
    ok = (
        dims1 == [0, 2]
        and dims2 == [0, 1, 1, 2]
        and len(quadrants.components) == 4
        and dims3 == [0, 2]
        and principal_open_dense
    )
    return ok, f"Z2 dims {dims1}; Z2^2 dims {dims2} with {len(quadrants.components)} principal components; circle dims {dims3}"


def entry_stabilizers():
    z22 = FiniteGroupAction.sign_flips(2)
    st = stabilizer(z22, (Fraction(0), Fraction(3)))
    flips_first = st.order == 2
    z2 = FiniteGroupAction.minus_identity(2)
    full = stabilizer(z2, (Fraction(0), Fraction(0))).order == 2
    triv = stabilizer(z2, (Fraction(1), Fraction(0))).order == 1
    ok = flips_first and full and triv
    return ok, f"sign-flip stabilizer of (0,3) has order {st.order}"


def entry_momentum_maps():
    rot1 = TorusAction(2, [(0, 1)], [[1]])
    w2 = SymplecticForm.standard(2)
    m1 = derive_momentum_map(rot1, w2)
    x, y = Polynomial.variables(2)
    expect1 = (x**2 + y**2) * Fraction(1, 2)
    act2 = TorusAction(4, [(0, 1), (2, 3)], [[1, -1]])
    w4 = SymplecticForm.standard(4)
    m2 = derive_momentum_map(act2, w4)
    v = Polynomial.variables(4)
    expect2 = (v[0] ** 2 + v[1] ** 2 - v[2] ** 2 - v[3] ** 2) * Fraction(1, 2)
    z = zero_level(m2, ["x1", "y1", "x2", "y2"])
    zdim = zariski_tangent(z, (1, 0, 1, 0)).dim
    tangent_ok = True
    for phi in m2.components:
        xf = hamiltonian_vector_field(w4, phi)
        for psi in m2.components:
            if not xf.apply_to(psi).is_zero():
                tangent_ok = False
    ok = (
        m1.components[0] == expect1
        and m1.verify()
        and m2.components[0] == expect2
        and m2.verify()
        and zdim == 3
        and tangent_ok
    )
    return ok, (
        f"Phi = {m1.components[0].to_string(['x','y'])}; "
        f"weights (1,-1) zero level has dim {zdim} at (1,0,1,0)"
    )


def entry_hamiltonian_fields():
    w = SymplecticForm.standard(2)
    x, y = Polynomial.variables(2)
    xf = hamiltonian_vector_field(w, (x**2 + y**2) * Fraction(1, 2))
    rotation = xf.components == [-y, x]
    bracket = poisson_bracket(w, x, y)
    ok = rotation and bracket == 1
    return ok, f"X_{{(x^2+y^2)/2}} = {xf.to_string(['x','y'])}, {{x, y}} = {bracket.to_string()}"


def entry_descent_witnesses():
    z2 = FiniteGroupAction.minus_identity(2)
    hm = _cone_map()
    x, y = Polynomial.variables(2)
    alpha = DifferentialForm.from_function(x**2 - y**2)
    res = find_descent_witness(z2, hm, alpha)
    round_trip = res.found and pullback(PolyMap(2, hm.generators), res.witness) == alpha
    s = Polynomial.variable(3, 0)
    beta = DifferentialForm.from_function(s)
    generated = pullback(PolyMap(2, hm.generators), beta)
    basic = is_basic(z2, generated).holds is True
    # the area form has no polynomial witness; clearing the u denominator
    # recovers exactly (1/(4u)) ds^dt
    area = DifferentialForm(2, 2, {(0, 1): 1})
    u = Polynomial.variable(3, 2)
    rational = find_descent_witness(z2, hm, area, denominator=u)
    sigma = DifferentialForm(
        3, 2, {(0, 1): parse_rational_function("1/(4*u)", ["s", "t", "u"])}
    )
    sigma_recovered = rational.found and rational.witness == sigma
    ok = round_trip and basic and sigma_recovered
    return ok, (
        f"witness for x^2 - y^2 found={res.found}; generator pullback basic; "
        f"area-form witness recovered as (1/(4u)) ds^dt: {sigma_recovered}"
    )


def entry_flows():
    cone = _cone_space()
    s, t, u = Polynomial.variables(3)
    radial = Derivation([s, t, u], name="radial")
    res = flow(cone, radial, (3, 4, 5), math.log(2))
    end = res.end_point
    rel = max(abs(a - b) / b for a, b in zip(end, (6.0, 8.0, 10.0)))
    x, y = Polynomial.variables(2)
    circle = SpaceDef(2, ["x", "y"], equations=[x**2 + y**2 - 1], sample_points=[(1, 0)])
    rot = Derivation([-y, x], name="rot")
    res2 = flow(circle, rot, (1, 0), math.pi / 2)
    err2 = max(abs(a - b) for a, b in zip(res2.end_point, (0.0, 1.0)))
    zero = Derivation([Polynomial.zero(2), Polynomial.zero(2)], name="zero")
    res3 = flow(SpaceDef(2, ["x", "y"], name="plane"), zero, (1, 2), 5.0)
    constant = all(p == (1.0, 2.0) for _, p in res3.trajectory)
    ok = rel < 1e-6 and err2 < 1e-6 and res2.drift_max <= 1e-9 and constant
    return ok, (
        f"radial doubling rel err {rel:.2e}; quarter-turn err {err2:.2e} "
        f"drift {res2.drift_max:.2e}; zero field constant={constant}"
    )


def entry_pushforward():
    plane = _plane()
    x, y = Polynomial.variables(2)
    xdy = Derivation([Polynomial.zero(2), x], name="x*dy")
    dx = Derivation([Polynomial.constant(2, 1), Polynomial.zero(2)], name="dx")
    pf = pushforward_along_flow(plane, xdy, dx, Fraction(1), (Fraction(0), Fraction(2)))
    exact_ok = pf.method == "exact" and pf.value == (Fraction(1), Fraction(1))
    rot = Derivation([-y, x], name="rot")
    pf2 = pushforward_along_flow(plane, rot, dx, math.pi / 2, (1.0, 0.0))
    numeric_ok = (
        pf2.method == "numeric"
        and abs(pf2.value[0] - 0.0) < 1e-4
        and abs(pf2.value[1] - 1.0) < 1e-4
    )
    ok = exact_ok and numeric_ok
    return ok, f"exact value {pf.value}; rotated dx -> ({pf2.value[0]:.2e}, {pf2.value[1]:.6f})"


ENTRIES = [
    ("zariski-dimensions", entry_zariski_dims),
    ("cone-pullback", entry_cone_pullback),
    ("sjamaar-pair", entry_sjamaar),
    ("hilbert-embedding", entry_hilbert_embedding),
    ("orthant-images", entry_orthant_images),
    ("field-classification", entry_classification),
    ("local-completeness", entry_local_completeness),
    ("orbit-exploration", entry_orbits),
    ("delta-profile", entry_delta_profile),
    ("orbit-type-stratifications", entry_stratifications),
    ("stabilizers", entry_stabilizers),
    ("momentum-maps", entry_momentum_maps),
    ("hamiltonian-fields", entry_hamiltonian_fields),
    ("descent-witnesses", entry_descent_witnesses),
    ("numerical-flows", entry_flows),
    ("flow-pushforward", entry_pushforward),
]


def run_gallery():
    """Run every entry; returns (all_ok, [(name, ok, detail)])."""
    results = []
    for name, fn in ENTRIES:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"error: {exc}"
        results.append((name, ok, detail))
    return all(ok for _, ok, _ in results), results
