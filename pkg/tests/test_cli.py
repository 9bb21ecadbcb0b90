"""End-to-end CLI runs: exit codes, formats, determinism."""

import json
import math
import subprocess
import sys

import pytest

from stratlab.cli import main

THREELINES = """\
[space]
dim = 2
vars = x, y
equations = x^2*y - x*y^2

[samples]
points = (0, 0); (2, 2)
"""

AXES3 = """\
[space]
dim = 3
vars = x, y, z
equations = x*y, y*z, z*x

[samples]
points = (0, 0, 0)
"""

HALFLINE = """\
[space]
dim = 1
vars = x
inequalities = x >= 0

[samples]
points = (0); (1)

[field.dx]
components = 1
"""

CIRCLE = """\
[space]
dim = 2
vars = x, y
equations = x^2 + y^2 - 1

[samples]
points = (1, 0)

[field.rot]
components = -y, x
"""

CONE_QUOTIENT = """\
[space]
dim = 2
vars = x, y

[samples]
points = (1, 1); (2, 0); (-1, -1); (1/2, 1/3); (0, 3)

[group]
kind = finite
generators = [-1, 0]; [0, -1]

[hilbert]
generators = x^2 - y^2, 2*x*y, x^2 + y^2
target_vars = s, t, u
relations = s^2 + t^2 - u^2

[strata.principal]
params = a, b
map = a, b
open = a^2 + b^2 > 0

[field.rot]
components = -y, x

[field.rad]
components = x, y

[form.area]
degree = 2
terms = 1 @ (1, 2)

[form.even]
degree = 0
terms = x^2 - y^2 @ ()

[form.sigma]
degree = 2
on = target
terms = 1/(4*u) @ (1, 2)
"""


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [
        ("threelines", THREELINES),
        ("axes3", AXES3),
        ("halfline", HALFLINE),
        ("circle", CIRCLE),
        ("conequot", CONE_QUOTIENT),
    ]:
        p = tmp_path / f"{name}.sl"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestTangent:
    def test_three_lines_dim(self, files, capsys):
        code, out, _ = run_cli(
            ["tangent", "--space", files["threelines"], "--point", "0,0"], capsys
        )
        assert code == 0
        assert "dim = 2" in out

    def test_json_dim_field(self, files, capsys):
        code, out, _ = run_cli(
            ["tangent", "--space", files["threelines"], "--point", "0,0", "--format", "json"],
            capsys,
        )
        payload = json.loads(out)
        assert payload["exact"]["dim"] == 2

    def test_two_spaces_compared(self, files, capsys):
        code, out, _ = run_cli(
            [
                "tangent",
                "--space",
                files["threelines"],
                "--space",
                files["axes3"],
                "--point",
                "0,0",
            ],
            capsys,
        )
        assert code == 0
        assert "dim = 2" in out and "dim_space2 = 3" in out


class TestClassify:
    def test_halfline_derivation_only(self, files, capsys):
        code, out, _ = run_cli(
            ["classify", "--space", files["halfline"], "--field", "dx"], capsys
        )
        assert code == 0
        assert "DerivationOnly" in out

    def test_unknown_field_usage_error(self, files, capsys):
        code, _, err = run_cli(
            ["classify", "--space", files["halfline"], "--field", "nope"], capsys
        )
        assert code == 2
        assert "nope" in err


class TestFlow:
    def test_circle_csv_monotone(self, files, capsys):
        code, out, _ = run_cli(
            [
                "flow",
                "--space",
                files["circle"],
                "--field",
                "rot",
                "--from",
                "1,0",
                "--t",
                str(math.pi / 2),
                "--format",
                "csv",
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,x1,x2"
        ts = [float(row.split(",")[0]) for row in lines[1:]]
        assert ts == sorted(ts)
        for row in lines[1:]:
            _, x, y = (float(v) for v in row.split(","))
            assert abs(x * x + y * y - 1) < 1e-6

    def test_flow_report_end_point(self, files, capsys):
        code, out, _ = run_cli(
            [
                "flow",
                "--space",
                files["circle"],
                "--field",
                "rot",
                "--from",
                "1,0",
                "--t",
                str(math.pi / 2),
                "--format",
                "json",
            ],
            capsys,
        )
        payload = json.loads(out)
        assert code == 0
        end = payload["numeric"]["end_point"]["value"]
        assert abs(end[0]) < 1e-6 and abs(end[1] - 1) < 1e-6


class TestChecks:
    def test_stratify(self, files, capsys):
        code, out, _ = run_cli(
            ["stratify", "--space", files["conequot"], "--format", "json"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        strata = json.loads(payload["exact"]["strata"])
        assert sorted(s["dim"] for s in strata["strata"]) == [0, 2]

    def test_embed(self, files, capsys):
        code, out, _ = run_cli(["embed", "--space", files["conequot"]], capsys)
        assert code == 0
        assert "verdict relations_hold: pass" in out
        assert "verdict separation: pass" in out

    def test_check_basic(self, files, capsys):
        code, out, _ = run_cli(
            ["check-basic", "--space", files["conequot"], "--form", "area"], capsys
        )
        assert code == 0

    def test_descend_even_function(self, files, capsys):
        code, out, _ = run_cli(
            ["descend", "--space", files["conequot"], "--form", "even", "--format", "json"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["verdicts"]["witness_found"] is True
        assert payload["verdicts"]["pullback_matches"] is True
        assert payload["exact"]["witness"] == "s"

    def test_check_sjamaar(self, files, capsys):
        code, out, _ = run_cli(
            [
                "check-sjamaar",
                "--space",
                files["conequot"],
                "--sigma",
                "sigma",
                "--alpha",
                "area",
            ],
            capsys,
        )
        assert code == 0
        assert "verdict identity: pass" in out

    def test_momentum_finite_zero(self, files, capsys):
        text = CONE_QUOTIENT + "\n[symplectic]\nkind = standard\n"
        import tempfile, os

        with tempfile.NamedTemporaryFile("w", suffix=".sl", delete=False) as fh:
            fh.write(text)
            path = fh.name
        try:
            code, out, _ = run_cli(["momentum", "--space", path], capsys)
            assert code == 0
            assert "phi = 0" in out
        finally:
            os.unlink(path)


class TestErrorsAndDeterminism:
    def test_parse_error_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.sl"
        p.write_text("[space]\ndim = 2\nvars = x, y\nequations = x^2 + z\n")
        code, _, err = run_cli(["tangent", "--space", str(p), "--point", "0,0"], capsys)
        assert code == 2
        assert "unknown variable" in err

    def test_missing_file_exit_2(self, capsys):
        code, _, err = run_cli(["tangent", "--space", "/nonexistent.sl", "--point", "0"], capsys)
        assert code == 2

    def test_point_off_space_exit_1(self, files, capsys):
        code, _, err = run_cli(
            ["tangent", "--space", files["circle"], "--point", "5,5"], capsys
        )
        assert code == 1

    def test_usage_error_exit_2(self, capsys):
        assert main(["tangent"]) == 2

    def test_byte_identical_reruns(self, files, capsys):
        args = ["stratify", "--space", files["conequot"], "--format", "json"]
        _, out1, _ = run_cli(args, capsys)
        _, out2, _ = run_cli(args, capsys)
        assert out1 == out2

    def test_out_file_written(self, files, tmp_path, capsys):
        target = tmp_path / "report.json"
        code, out, _ = run_cli(
            [
                "tangent",
                "--space",
                files["threelines"],
                "--point",
                "0,0",
                "--format",
                "json",
                "--out",
                str(target),
            ],
            capsys,
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["exact"]["dim"] == 2


class TestConsoleEntryPoint:
    def test_module_invocation(self, files):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "stratlab.cli",
                "tangent",
                "--space",
                files["threelines"],
                "--point",
                "0,0",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "dim = 2" in proc.stdout


class TestGalleryAndEmit:
    def test_gallery_all_green(self, capsys):
        code, out, _ = run_cli(["gallery"], capsys)
        assert code == 0
        assert "FAIL" not in out
        assert "zariski-dimensions: " in out

    def test_empty_report_json(self, capsys):
        from stratlab.cli import Report, emit

        emit(Report(command="noop"), "json")
        out = capsys.readouterr().out
        payload = json.loads(out)
        assert payload["exact"] == {} and payload["verdicts"] == {}
        assert payload["command"] == "noop"


TORUS_SYMPLECTIC = """\
[space]
dim = 2
vars = x, y

[samples]
points = (0, 0)

[group]
kind = torus
planes = (1, 2)
weights = [1]

[symplectic]
kind = standard
"""


class TestMomentumTorus:
    def test_weight_one_momentum(self, tmp_path, capsys):
        p = tmp_path / "rot.sl"
        p.write_text(TORUS_SYMPLECTIC)
        code, out, _ = run_cli(["momentum", "--space", str(p), "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["verdicts"]["identity"] is True
        assert payload["exact"]["phi_1"] == "1/2*x^2 + 1/2*y^2"
