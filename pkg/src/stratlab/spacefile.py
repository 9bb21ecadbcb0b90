"""The .sl space-definition file format: sectioned key-value text.

One file describes one ambient space plus the objects living on it: group
action, symplectic matrix, Hilbert map, named fields and forms, stratum
parametrizations, and sample points.  Parsing validates every polynomial
against the declared variables and resolves cross-references; a parsed file
serializes back to a canonical form that round-trips byte-identically.

Layout example::

    [space]
    dim = 2
    vars = x, y
    equations = x^2 + y^2 - 1
    samples = (1, 0)

    [field.rot]
    components = -y, x
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .actions import FiniteGroupAction, HilbertMap, TorusAction
from .diffspace import GE, GT, Piece, SpaceDef, StratumParam
from .fields import Derivation
from .forms import DifferentialForm
from .hamiltonian import SymplecticForm
from .polyalg import ParseError, parse_polynomial, parse_rational_function

__all__ = ["SpaceFile", "SpaceFileError", "parse", "parse_text"]


@dataclass
class Positioned:
    line: int
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}"


class SpaceFileError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


@dataclass
class SpaceFile:
    space: SpaceDef
    group: Optional[object] = None  # FiniteGroupAction | TorusAction
    symplectic: Optional[SymplecticForm] = None
    hilbert: Optional[HilbertMap] = None
    fields: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)  # name -> (DifferentialForm, which_vars)
    source_path: Optional[str] = None

    def serialize(self) -> str:
        return _serialize(self)


def _split_top(text: str, sep: str):
    """Split on a separator at parenthesis/bracket depth zero."""
    parts = []
    depth = 0
    current = []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    tail = "".join(current).strip()
    if tail or parts:
        parts.append(tail)
    return [p for p in parts if p != ""]


def _parse_sections(text: str, errors):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.strip().startswith("["):
            m = re.fullmatch(r"\[([A-Za-z0-9_.-]+)\]", line.strip())
            if not m:
                errors.append(Positioned(lineno, f"malformed section header {line.strip()!r}"))
                current = None
                continue
            current = (m.group(1), lineno, {})
            sections.append(current)
            continue
        if "=" not in line:
            errors.append(Positioned(lineno, f"expected 'key = value', got {line.strip()!r}"))
            continue
        if current is None:
            errors.append(Positioned(lineno, "key-value pair outside any section"))
            continue
        key, value = line.split("=", 1)
        key = key.strip()
        if key in current[2]:
            errors.append(Positioned(lineno, f"duplicate key {key!r} in [{current[0]}]"))
        current[2][key] = (value.strip(), lineno)
    return sections


def _parse_number(text: str, lineno: int, errors):
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        if "." in text or "e" in text or "E" in text:
            return float(text)
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        errors.append(Positioned(lineno, f"malformed number {text!r}"))
        return Fraction(0)


def _parse_point(text: str, lineno: int, errors, dim=None):
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        errors.append(Positioned(lineno, f"point must be parenthesized: {text!r}"))
        return None
    entries = _split_top(text[1:-1], ",")
    point = tuple(_parse_number(e, lineno, errors) for e in entries)
    if dim is not None and len(point) != dim:
        errors.append(Positioned(lineno, f"point {text!r} has {len(point)} entries, expected {dim}"))
        return None
    return point


def _parse_poly_list(text: str, var_names, lineno: int, errors):
    out = []
    for part in _split_top(text, ","):
        try:
            out.append(parse_polynomial(part, var_names))
        except ParseError as exc:
            errors.append(Positioned(lineno, f"{exc.message} in {part!r}"))
    return out


def _parse_matrix_rows(text: str, lineno: int, errors):
    rows = []
    for part in _split_top(text, ";"):
        part = part.strip()
        if not (part.startswith("[") and part.endswith("]")):
            errors.append(Positioned(lineno, f"matrix row must be bracketed: {part!r}"))
            continue
        rows.append([_parse_number(e, lineno, errors) for e in _split_top(part[1:-1], ",")])
    return rows


def parse_text(text: str, source_path: Optional[str] = None) -> SpaceFile:
    """Parse .sl text into a validated SpaceFile; raises SpaceFileError with
    positioned messages on failure."""
    errors = []
    sections = _parse_sections(text, errors)
    by_name = {}
    for name, lineno, kv in sections:
        if name in by_name:
            errors.append(Positioned(lineno, f"duplicate section [{name}]"))
        by_name[name] = (lineno, kv)

    if "space" not in by_name:
        errors.append(Positioned(1, "missing [space] section"))
        raise SpaceFileError(errors)
    sp_line, sp = by_name["space"]

    def get(kv, key, default=None):
        if key in kv:
            return kv[key]
        return (default, sp_line)

    dim_text, dim_line = get(sp, "dim")
    if dim_text is None:
        errors.append(Positioned(sp_line, "ambient dim required"))
        raise SpaceFileError(errors)
    try:
        dim = int(dim_text)
    except ValueError:
        errors.append(Positioned(dim_line, f"dim must be an integer, got {dim_text!r}"))
        raise SpaceFileError(errors)

    vars_text, vars_line = get(sp, "vars")
    if vars_text is None:
        var_names = [f"x{i+1}" for i in range(dim)]
    else:
        var_names = [v.strip() for v in vars_text.split(",")]
        if len(var_names) != dim:
            errors.append(Positioned(vars_line, f"expected {dim} variable names"))

    equations = []
    if "equations" in sp:
        text_val, line = sp["equations"]
        equations = _parse_poly_list(text_val, var_names, line, errors)

    inequalities = []
    if "inequalities" in sp:
        text_val, line = sp["inequalities"]
        for part in _split_top(text_val, ","):
            m = re.fullmatch(r"(.*?)(>=|>)\s*0", part.strip())
            if not m:
                errors.append(Positioned(line, f"inequality must look like 'p >= 0' or 'p > 0': {part!r}"))
                continue
            try:
                poly = parse_polynomial(m.group(1), var_names)
            except ParseError as exc:
                errors.append(Positioned(line, exc.message))
                continue
            inequalities.append((poly, GE if m.group(2) == ">=" else GT))

    samples = []
    if "samples" in by_name:
        line, kv = by_name["samples"]
        if "points" in kv:
            text_val, pline = kv["points"]
            for part in _split_top(text_val, ";"):
                p = _parse_point(part, pline, errors, dim)
                if p is not None:
                    samples.append(p)

    pieces = []
    for name in sorted(by_name):
        if not name.startswith("piece."):
            continue
        line, kv = by_name[name]
        peqs = []
        pineqs = []
        if "equations" in kv:
            t, ln = kv["equations"]
            peqs = _parse_poly_list(t, var_names, ln, errors)
        if "inequalities" in kv:
            t, ln = kv["inequalities"]
            for part in _split_top(t, ","):
                m = re.fullmatch(r"(.*?)(>=|>)\s*0", part.strip())
                if not m:
                    errors.append(Positioned(ln, f"bad inequality {part!r}"))
                    continue
                try:
                    poly = parse_polynomial(m.group(1), var_names)
                except ParseError as exc:
                    errors.append(Positioned(ln, exc.message))
                    continue
                pineqs.append((poly, GE if m.group(2) == ">=" else GT))
        pieces.append(Piece(peqs, pineqs))

    strata = []
    for name in sorted(by_name):
        if not name.startswith("strata."):
            continue
        line, kv = by_name[name]
        sname = name.split(".", 1)[1]
        if "params" not in kv or "map" not in kv:
            errors.append(Positioned(line, f"stratum {sname!r} needs 'params' and 'map'"))
            continue
        ptext, pline = kv["params"]
        param_names = [v.strip() for v in ptext.split(",")]
        mtext, mline = kv["map"]
        mapping = _parse_poly_list(mtext, param_names, mline, errors)
        open_constraints = []
        if "open" in kv:
            otext, oline = kv["open"]
            for part in _split_top(otext, ","):
                m = re.fullmatch(r"(.*?)(>=|>)\s*0", part.strip())
                if not m:
                    errors.append(Positioned(oline, f"bad open constraint {part!r}"))
                    continue
                try:
                    poly = parse_polynomial(m.group(1), param_names)
                except ParseError as exc:
                    errors.append(Positioned(oline, exc.message))
                    continue
                open_constraints.append((poly, GE if m.group(2) == ">=" else GT))
        label = kv.get("stabilizer", (None, line))[0]
        if not errors:
            strata.append(
                StratumParam(
                    sname,
                    len(param_names),
                    mapping,
                    open_constraints=open_constraints,
                    stabilizer_label=label,
                )
            )

    if errors:
        raise SpaceFileError(errors)

    try:
        space = SpaceDef(
            dim,
            var_names,
            equations=equations,
            inequalities=inequalities,
            pieces=pieces or None,
            strata=strata,
            sample_points=samples or None,
            name=(source_path or "space"),
        )
    except ValueError as exc:
        raise SpaceFileError([Positioned(sp_line, str(exc))])

    group = None
    if "group" in by_name:
        line, kv = by_name["group"]
        kind, kline = kv.get("kind", (None, line))
        if kind == "finite":
            if "generators" not in kv:
                errors.append(Positioned(line, "finite group needs 'generators'"))
            else:
                t, ln = kv["generators"]
                rows = _parse_matrix_rows(t, ln, errors)
                mats = []
                size = dim
                if len(rows) % size != 0:
                    errors.append(Positioned(ln, f"generator rows do not form {size}x{size} matrices"))
                else:
                    for k in range(0, len(rows), size):
                        mats.append(rows[k : k + size])
                if not errors:
                    try:
                        group = FiniteGroupAction(dim, mats)
                    except ValueError as exc:
                        errors.append(Positioned(ln, str(exc)))
        elif kind == "torus":
            planes = []
            if "planes" in kv:
                t, ln = kv["planes"]
                for part in _split_top(t, ";"):
                    p = _parse_point(part, ln, errors, 2)
                    if p is not None:
                        planes.append((int(p[0]) - 1, int(p[1]) - 1))
            weights = []
            if "weights" in kv:
                t, ln = kv["weights"]
                weights = [[int(v) for v in row] for row in _parse_matrix_rows(t, ln, errors)]
            if not errors:
                try:
                    group = TorusAction(dim, planes, weights)
                except ValueError as exc:
                    errors.append(Positioned(line, str(exc)))
        else:
            errors.append(Positioned(kline if kind else line, f"group kind must be finite or torus, got {kind!r}"))

    symplectic = None
    if "symplectic" in by_name:
        line, kv = by_name["symplectic"]
        kind = kv.get("kind", ("standard", line))[0]
        try:
            if kind == "standard":
                pairs = None
                if "pairs" in kv:
                    t, ln = kv["pairs"]
                    pairs = []
                    for part in _split_top(t, ";"):
                        p = _parse_point(part, ln, errors, 2)
                        if p is not None:
                            pairs.append((int(p[0]) - 1, int(p[1]) - 1))
                symplectic = SymplecticForm.standard(dim, pairs)
            elif "matrix" in kv:
                t, ln = kv["matrix"]
                symplectic = SymplecticForm(_parse_matrix_rows(t, ln, errors))
            else:
                errors.append(Positioned(line, "symplectic section needs kind=standard or a matrix"))
        except ValueError as exc:
            errors.append(Positioned(line, str(exc)))

    hilbert = None
    target_names = None
    if "hilbert" in by_name:
        line, kv = by_name["hilbert"]
        if "generators" not in kv:
            errors.append(Positioned(line, "hilbert section needs 'generators'"))
        else:
            t, ln = kv["generators"]
            gens = _parse_poly_list(t, var_names, ln, errors)
            if "target_vars" in kv:
                tv, _ = kv["target_vars"]
                target_names = [v.strip() for v in tv.split(",")]
            relations = []
            if "relations" in kv and target_names:
                t2, ln2 = kv["relations"]
                relations = _parse_poly_list(t2, target_names, ln2, errors)
            if not errors:
                try:
                    hilbert = HilbertMap(gens, target_names, relations)
                except ValueError as exc:
                    errors.append(Positioned(line, str(exc)))

    named_fields = {}
    for name in sorted(by_name):
        if not name.startswith("field."):
            continue
        line, kv = by_name[name]
        fname = name.split(".", 1)[1]
        if "components" not in kv:
            errors.append(Positioned(line, f"field {fname!r} needs 'components'"))
            continue
        t, ln = kv["components"]
        comps = _parse_poly_list(t, var_names, ln, errors)
        if len(comps) != dim:
            errors.append(Positioned(ln, f"field {fname!r} needs {dim} components"))
            continue
        named_fields[fname] = Derivation(comps, name=fname)

    named_forms = {}
    for name in sorted(by_name):
        if not name.startswith("form."):
            continue
        line, kv = by_name[name]
        fname = name.split(".", 1)[1]
        on = kv.get("on", ("space", line))[0]
        if on == "target":
            if hilbert is None:
                errors.append(Positioned(line, f"form {fname!r} is on the quotient but no [hilbert] section exists"))
                continue
            form_vars = hilbert.target_names
        elif on == "space":
            form_vars = var_names
        else:
            errors.append(Positioned(line, f"form 'on' must be space or target, got {on!r}"))
            continue
        try:
            degree = int(kv.get("degree", ("0", line))[0])
        except ValueError:
            errors.append(Positioned(line, f"form {fname!r}: degree must be an integer"))
            continue
        terms = {}
        if "terms" in kv:
            t, ln = kv["terms"]
            for part in _split_top(t, ";"):
                if "@" not in part:
                    errors.append(Positioned(ln, f"form term must be 'coefficient @ (indices)': {part!r}"))
                    continue
                coeff_text, idx_text = part.split("@", 1)
                try:
                    coeff = parse_rational_function(coeff_text.strip(), form_vars)
                except ParseError as exc:
                    errors.append(Positioned(ln, exc.message))
                    continue
                idx_text = idx_text.strip()
                if idx_text == "()":
                    idx = ()
                else:
                    p = _parse_point(idx_text, ln, errors)
                    if p is None:
                        continue
                    idx = tuple(int(v) - 1 for v in p)
                if len(idx) != degree:
                    errors.append(Positioned(ln, f"index tuple {idx_text} does not match degree {degree}"))
                    continue
                terms[idx] = coeff
        try:
            named_forms[fname] = (DifferentialForm(len(form_vars), degree, terms), on)
        except ValueError as exc:
            errors.append(Positioned(line, str(exc)))

    known_prefixes = ("space", "group", "symplectic", "hilbert", "samples")
    for name, lineno, _kv in sections:
        base = name.split(".", 1)[0]
        if name not in known_prefixes and base not in ("piece", "strata", "field", "form"):
            errors.append(Positioned(lineno, f"unknown section [{name}]"))

    if errors:
        raise SpaceFileError(errors)
    return SpaceFile(
        space=space,
        group=group,
        symplectic=symplectic,
        hilbert=hilbert,
        fields=named_fields,
        forms=named_forms,
        source_path=source_path,
    )


def parse(path: str) -> SpaceFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_text(fh.read(), source_path=path)


# -- canonical serialization -------------------------------------------------------


def _num_str(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def _point_str(p) -> str:
    return "(" + ", ".join(_num_str(v) for v in p) + ")"


def _serialize(sf: SpaceFile) -> str:
    space = sf.space
    vn = space.var_names
    lines = ["[space]", f"dim = {space.nvars}", "vars = " + ", ".join(vn)]
    if space.equations:
        lines.append("equations = " + ", ".join(p.to_string(vn) for p in space.equations))
    if space.inequalities:
        lines.append(
            "inequalities = "
            + ", ".join(f"{p.to_string(vn)} {rel} 0" for p, rel in space.inequalities)
        )
    if space.sample_points:
        lines.append("")
        lines.append("[samples]")
        lines.append("points = " + "; ".join(_point_str(p) for p in space.sample_points))
    for i, piece in enumerate(space.pieces):
        lines.append("")
        lines.append(f"[piece.{i+1}]")
        if piece.equations:
            lines.append("equations = " + ", ".join(p.to_string(vn) for p in piece.equations))
        if piece.inequalities:
            lines.append(
                "inequalities = "
                + ", ".join(f"{p.to_string(vn)} {rel} 0" for p, rel in piece.inequalities)
            )
    if sf.group is not None:
        lines.append("")
        lines.append("[group]")
        if sf.group.kind == "finite":
            lines.append("kind = finite")
            rows = []
            for g in sf.group.generators:
                rows.extend("[" + ", ".join(_num_str(v) for v in row) + "]" for row in g)
            lines.append("generators = " + "; ".join(rows))
        else:
            lines.append("kind = torus")
            lines.append(
                "planes = " + "; ".join(f"({i+1}, {j+1})" for i, j in sf.group.planes)
            )
            lines.append(
                "weights = "
                + "; ".join("[" + ", ".join(str(w) for w in row) + "]" for row in sf.group.weights)
            )
    if sf.symplectic is not None:
        lines.append("")
        lines.append("[symplectic]")
        lines.append("kind = matrix")
        lines.append(
            "matrix = "
            + "; ".join(
                "[" + ", ".join(_num_str(v) for v in row) + "]" for row in sf.symplectic.matrix
            )
        )
    if sf.hilbert is not None:
        lines.append("")
        lines.append("[hilbert]")
        lines.append("generators = " + ", ".join(p.to_string(vn) for p in sf.hilbert.generators))
        lines.append("target_vars = " + ", ".join(sf.hilbert.target_names))
        if sf.hilbert.relations:
            lines.append(
                "relations = "
                + ", ".join(r.to_string(sf.hilbert.target_names) for r in sf.hilbert.relations)
            )
    for stratum in space.strata:
        lines.append("")
        lines.append(f"[strata.{stratum.name}]")
        pnames = [f"a{i+1}" for i in range(stratum.domain_dim)]
        lines.append("params = " + ", ".join(pnames))
        lines.append("map = " + ", ".join(p.to_string(pnames) for p in stratum.mapping))
        if stratum.open_constraints:
            lines.append(
                "open = "
                + ", ".join(f"{p.to_string(pnames)} {rel} 0" for p, rel in stratum.open_constraints)
            )
        if stratum.stabilizer_label:
            lines.append(f"stabilizer = {stratum.stabilizer_label}")
    for fname in sorted(sf.fields):
        lines.append("")
        lines.append(f"[field.{fname}]")
        lines.append(
            "components = " + ", ".join(c.to_string(vn) for c in sf.fields[fname].components)
        )
    for fname in sorted(sf.forms):
        form, on = sf.forms[fname]
        form_vars = sf.hilbert.target_names if on == "target" else vn
        lines.append("")
        lines.append(f"[form.{fname}]")
        lines.append(f"degree = {form.degree}")
        if on != "space":
            lines.append(f"on = {on}")
        if form.terms:
            parts = []
            for idx in sorted(form.terms):
                coeff = form.terms[idx]
                idx_text = "()" if not idx else "(" + ", ".join(str(i + 1) for i in idx) + ")"
                parts.append(f"{coeff.to_string(form_vars)} @ {idx_text}")
            lines.append("terms = " + "; ".join(parts))
    return "\n".join(lines) + "\n"
