"""Command-line front end.

Subcommands dispatch to the library, emit a human-readable report plus
machine-readable JSON/CSV, and exit 0 when every verdict passes, 1 when a
check fails, 2 on usage or parse errors.  Output is deterministic: JSON keys
are sorted and no timestamps or addresses are printed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import spacefile
from .actions import hilbert_embed, orbit_type_partition
from .diffspace import orbital_tangent, zariski_tangent
from .fields import FlowParams, OrbitParams, classify, flow, is_admissible, orbit_explore
from .forms import find_descent_witness, is_basic, pullback
from .hamiltonian import check_sjamaar, derive_momentum_map
from .spacefile import SpaceFileError

USAGE_EXIT = 2
CHECK_FAILED_EXIT = 1


@dataclass
class Report:
    """Verdicts plus exact and numeric values, each numeric with its tolerance."""

    command: str
    verdicts: dict = field(default_factory=dict)
    exact: dict = field(default_factory=dict)  # name -> string (re-parseable)
    numeric: dict = field(default_factory=dict)  # name -> {"value":..., "tol":...}
    provenance: dict = field(default_factory=dict)  # name -> symbolic | numeric
    table: tuple = None  # (header, rows) for CSV output
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.verdicts.values())

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "verdicts": self.verdicts,
            "exact": self.exact,
            "numeric": self.numeric,
            "provenance": self.provenance,
            "notes": self.notes,
        }
        return json.dumps(payload, sort_keys=True, default=str)

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for k in sorted(self.verdicts):
            lines.append(f"verdict {k}: {'pass' if self.verdicts[k] else 'FAIL'}")
        for k in sorted(self.exact):
            lines.append(f"{k} = {self.exact[k]}  [exact]")
        for k in sorted(self.numeric):
            entry = self.numeric[k]
            lines.append(f"{k} = {entry['value']}  [numeric, tol {entry['tol']}]")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        if self.table is None:
            return "key,value\n" + "".join(
                f"{k},{v}\n" for k, v in sorted({**self.exact}.items())
            )
        header, rows = self.table
        out = [",".join(header)]
        for row in rows:
            out.append(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row))
        return "\n".join(out) + "\n"


def emit(report: Report, fmt: str = "text", path=None):
    """Write a report deterministically to path or stdout."""
    if fmt == "json":
        payload = report.to_json() + "\n"
    elif fmt == "csv":
        payload = report.to_csv()
    else:
        payload = report.to_text()
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _parse_point(text: str):
    parts = [p.strip() for p in text.split(",")]
    out = []
    exact = True
    for p in parts:
        if "." in p or "e" in p or "E" in p:
            exact = False
    for p in parts:
        if exact:
            if "/" in p:
                num, den = p.split("/")
                out.append(Fraction(int(num), int(den)))
            else:
                out.append(Fraction(int(p)))
        else:
            out.append(float(p))
    return tuple(out)


def _load(path: str) -> spacefile.SpaceFile:
    return spacefile.parse(path)


def _field_by_name(sf, name: str):
    if name not in sf.fields:
        raise KeyError(f"no [field.{name}] in {sf.source_path}")
    return sf.fields[name]


def _form_by_name(sf, name: str):
    if name not in sf.forms:
        raise KeyError(f"no [form.{name}] in {sf.source_path}")
    return sf.forms[name]


def _num_str(v):
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def cmd_tangent(args):
    sf = _load(args.space[0])
    point = _parse_point(args.point)
    if args.family:
        family = [_field_by_name(sf, n) for n in args.family.split(",")]
        ts = orbital_tangent(sf.space, family, point, tol=args.tol)
        kind = "orbital"
    else:
        ts = zariski_tangent(sf.space, point)
        kind = "zariski"
    report = Report(command=f"tangent {kind} at {args.point}")
    report.exact["dim"] = ts.dim
    report.exact["basis"] = json.dumps(
        [[_num_str(v) for v in vec] for vec in ts.basis], sort_keys=True
    )
    report.provenance["dim"] = (
        "symbolic" if all(isinstance(v, Fraction) for v in point) else "numeric"
    )
    # comparison mode: one dim per extra --space (origin-like points only make
    # sense when the ambient dimensions differ, so each file supplies its own)
    for i, path in enumerate(args.space[1:], start=2):
        other = _load(path)
        opoint = point
        if len(point) != other.space.nvars:
            opoint = tuple(Fraction(0) for _ in range(other.space.nvars))
            report.notes.append(
                f"space {i}: point reinterpreted as the origin of R^{other.space.nvars}"
            )
        ots = zariski_tangent(other.space, opoint)
        report.exact[f"dim_space{i}"] = ots.dim
    return report


def cmd_classify(args):
    sf = _load(args.space[0])
    X = _field_by_name(sf, args.field)
    verdict = is_admissible(sf.space, X)
    result = classify(sf.space, X, t_window=args.t_window)
    report = Report(command=f"classify field {args.field}")
    report.verdicts["admissible"] = verdict.admissible is not False
    report.exact["classification"] = result.kind
    report.notes.append(result.reason)
    report.provenance["classification"] = "numeric"
    return report


def cmd_flow(args):
    sf = _load(args.space[0])
    X = _field_by_name(sf, args.field)
    x0 = _parse_point(getattr(args, "from"))
    params = FlowParams(step=args.step, tol=args.tol, project=not args.no_project)
    result = flow(sf.space, X, x0, args.t, params)
    report = Report(command=f"flow {args.field} from {getattr(args, 'from')} for t={args.t}")
    report.verdicts["completed"] = result.terminal_status == "completed"
    report.verdicts["drift"] = result.drift_max <= args.drift_tol
    report.numeric["end_point"] = {
        "value": [float(v) for v in result.end_point],
        "tol": args.tol,
    }
    report.numeric["drift_max"] = {"value": result.drift_max, "tol": args.drift_tol}
    report.exact["status"] = result.terminal_status
    report.provenance["end_point"] = "numeric"
    header = ["t"] + [f"x{i+1}" for i in range(sf.space.nvars)]
    rows = [[t] + [float(v) for v in p] for t, p in result.trajectory]
    report.table = (header, rows)
    return report


def cmd_orbit(args):
    sf = _load(args.space[0])
    family = [_field_by_name(sf, n) for n in args.family.split(",")]
    seed = _parse_point(args.seed)
    params = OrbitParams(
        depth=args.depth, dedup_radius=args.dedup_radius, max_points=args.max_points
    )
    if args.t_grid:
        params.time_grid = tuple(float(t) for t in args.t_grid.split(","))
    orb = orbit_explore(sf.space, family, seed, params)
    report = Report(command=f"orbit of {args.family} from {args.seed}")
    report.exact["est_dim"] = str(orb.est_dim)
    report.exact["cloud_size"] = str(len(orb))
    report.numeric["drift_max"] = {"value": orb.drift_max, "tol": 1e-8}
    report.verdicts["drift"] = orb.drift_max <= 1e-8
    report.verdicts["rank_consistent"] = all(
        r == orb.est_dim for _, r in orb.tangent_rank_along
    )
    report.provenance["est_dim"] = "numeric"
    header = ["t"] + [f"x{i+1}" for i in range(sf.space.nvars)]
    rows = [[float(i)] + [float(v) for v in p] for i, p in enumerate(orb.points)]
    report.table = (header, rows)
    return report


def cmd_stratify(args):
    sf = _load(args.space[0])
    if sf.group is None:
        raise KeyError("stratify needs a [group] section")
    strat = orbit_type_partition(sf.group, sf.space)
    report = Report(command="orbit-type stratification")
    report.exact["strata"] = strat.to_json()
    dims = [s.dim for s in strat.strata]
    principal = strat.principal()
    report.exact["dims"] = json.dumps(sorted(dims))
    report.verdicts["principal_open_dense"] = all(
        s.dim < principal.dim for s in strat.strata if s is not principal
    ) or len(strat.strata) == 1
    report.provenance["strata"] = "symbolic"
    return report


def cmd_embed(args):
    sf = _load(args.space[0])
    if sf.group is None or sf.hilbert is None:
        raise KeyError("embed needs [group] and [hilbert] sections")
    samples = list(sf.space.sample_points)
    result = hilbert_embed(sf.group, sf.hilbert, samples)
    report = Report(command="hilbert embedding")
    report.verdicts["relations_hold"] = result.relations_hold
    report.verdicts["separation"] = result.separation != "failed"
    report.exact["separation"] = result.separation
    report.exact["images"] = json.dumps(
        [[_num_str(v) for v in img] for img in result.images], sort_keys=True
    )
    report.provenance["separation"] = "symbolic"
    report.notes.extend(result.notes)
    return report


def cmd_check_basic(args):
    sf = _load(args.space[0])
    if sf.group is None:
        raise KeyError("check-basic needs a [group] section")
    form, on = _form_by_name(sf, args.form)
    if on != "space":
        raise KeyError(f"form {args.form} lives on the quotient; check-basic works upstairs")
    verdict = is_basic(sf.group, form, sf.space)
    report = Report(command=f"check-basic {args.form}")
    report.verdicts["basic"] = verdict.holds is True
    report.exact["certainty"] = verdict.certainty
    report.provenance["basic"] = verdict.certainty
    report.notes.extend(str(d) for d in verdict.details)
    return report


def cmd_descend(args):
    sf = _load(args.space[0])
    if sf.group is None or sf.hilbert is None:
        raise KeyError("descend needs [group] and [hilbert] sections")
    form, on = _form_by_name(sf, args.form)
    if on != "space":
        raise KeyError("descend expects a form on the space (it searches for the quotient witness)")
    result = find_descent_witness(
        sf.group, sf.hilbert, form, degree_bound=args.degree_bound, space=sf.space
    )
    report = Report(command=f"descend {args.form}")
    report.verdicts["witness_found"] = result.found
    report.exact["status"] = result.status
    report.exact["degree_bound"] = str(result.degree_bound)
    if result.found:
        report.exact["witness"] = result.witness.to_string(sf.hilbert.target_names)
        from .forms import PolyMap

        check = pullback(PolyMap(sf.space.nvars, sf.hilbert.generators), result.witness)
        report.verdicts["pullback_matches"] = check == form
    report.provenance["status"] = "symbolic"
    return report


def cmd_momentum(args):
    sf = _load(args.space[0])
    if sf.group is None or sf.symplectic is None:
        raise KeyError("momentum needs [group] and [symplectic] sections")
    phi = derive_momentum_map(sf.group, sf.symplectic)
    report = Report(command="momentum map")
    report.verdicts["identity"] = phi.verify()
    for i, comp in enumerate(phi.components):
        report.exact[f"phi_{i+1}"] = comp.to_string(sf.space.var_names)
    if not phi.components:
        report.exact["phi"] = "0"
        report.notes.append("finite group: the momentum map is identically zero")
    report.provenance["identity"] = "symbolic"
    return report


def cmd_check_sjamaar(args):
    sf = _load(args.space[0])
    if sf.group is None or sf.hilbert is None:
        raise KeyError("check-sjamaar needs [group] and [hilbert] sections")
    sigma, on_s = _form_by_name(sf, args.sigma)
    alpha, on_a = _form_by_name(sf, args.alpha)
    if on_s != "target":
        raise KeyError(f"sigma ({args.sigma}) must be declared with 'on = target'")
    if on_a != "space":
        raise KeyError(f"alpha ({args.alpha}) must live on the space")
    if args.stratum:
        candidates = [s for s in sf.space.strata if s.name == args.stratum]
        if not candidates:
            raise KeyError(f"no [strata.{args.stratum}] section")
        stratum = candidates[0]
    elif sf.space.strata:
        stratum = sf.space.strata[0]
    else:
        raise KeyError("check-sjamaar needs a principal stratum parametrization")
    verdict = check_sjamaar(sf.group, sf.hilbert, stratum, sigma, alpha)
    report = Report(command=f"check-sjamaar sigma={args.sigma} alpha={args.alpha}")
    report.verdicts["identity"] = verdict.verified
    report.verdicts["alpha_invariant"] = verdict.invariant
    report.provenance["identity"] = "symbolic"
    report.notes.extend(verdict.details)
    return report


def cmd_gallery(args):
    from .gallery import run_gallery

    ok, results = run_gallery()
    report = Report(command="gallery")
    for name, good, detail in results:
        report.verdicts[name] = good
        report.notes.append(f"{name}: {detail}")
    return report


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stratlab",
        description="exact and numerical computation on singular subsets and quotients of R^n",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, space=True):
        if space:
            p.add_argument("--space", action="append", required=True, help=".sl space file")
        p.add_argument("--format", choices=["text", "json", "csv"], default="text")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("tangent", help="Zariski or orbital tangent space at a point")
    common(p)
    p.add_argument("--point", required=True)
    p.add_argument("--family", default=None, help="comma-separated field names for the orbital case")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(fn=cmd_tangent)

    p = sub.add_parser("classify", help="derivation vs vector field")
    common(p)
    p.add_argument("--field", required=True)
    p.add_argument("--t-window", type=float, default=1.0, dest="t_window")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("flow", help="integrate a field from a point")
    common(p)
    p.add_argument("--field", required=True)
    p.add_argument("--from", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--drift-tol", type=float, default=1e-8, dest="drift_tol")
    p.add_argument("--no-project", action="store_true")
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("orbit", help="explore the orbit of a family of fields")
    common(p)
    p.add_argument("--family", required=True)
    p.add_argument("--seed", required=True)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--dedup-radius", type=float, default=1e-3, dest="dedup_radius")
    p.add_argument("--max-points", type=int, default=200, dest="max_points")
    p.add_argument("--t-grid", default=None, dest="t_grid")
    p.set_defaults(fn=cmd_orbit)

    p = sub.add_parser("stratify", help="orbit-type stratification of the space")
    common(p)
    p.set_defaults(fn=cmd_stratify)

    p = sub.add_parser("embed", help="Hilbert-map embedding report")
    common(p)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("check-basic", help="invariance + horizontality of a form")
    common(p)
    p.add_argument("--form", required=True)
    p.set_defaults(fn=cmd_check_basic)

    p = sub.add_parser("descend", help="search a quotient-side witness for a basic form")
    common(p)
    p.add_argument("--form", required=True)
    p.add_argument("--degree-bound", type=int, default=None, dest="degree_bound")
    p.set_defaults(fn=cmd_descend)

    p = sub.add_parser("momentum", help="derive the momentum map")
    common(p)
    p.set_defaults(fn=cmd_momentum)

    p = sub.add_parser("check-sjamaar", help="verify a quotient form against its extension")
    common(p)
    p.add_argument("--sigma", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--stratum", default=None)
    p.set_defaults(fn=cmd_check_sjamaar)

    p = sub.add_parser("gallery", help="run the built-in regression corpus")
    common(p, space=False)
    p.set_defaults(fn=cmd_gallery)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    try:
        report = args.fn(args)
    except SpaceFileError as exc:
        for err in exc.errors:
            sys.stderr.write(f"parse error: {err}\n")
        return USAGE_EXIT
    except (KeyError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    except (ValueError, ZeroDivisionError, RuntimeError) as exc:
        sys.stderr.write(f"check error: {exc}\n")
        return CHECK_FAILED_EXIT
    emit(report, args.format, args.out)
    return 0 if report.passed else CHECK_FAILED_EXIT


if __name__ == "__main__":
    sys.exit(main())
