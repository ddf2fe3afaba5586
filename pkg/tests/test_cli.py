import json
import subprocess
import sys

import pytest

from carnot import io as cio
from carnot.algebras import heisenberg
from carnot.cli import main
from golden_cases import CASES, golden_path


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_reports(capsys, name):
    code, out, _ = run(capsys, CASES[name])
    with open(golden_path(name)) as fh:
        assert out == fh.read()
    assert code in (0, 1)


def test_algebra_check(capsys):
    code, out, _ = run(capsys, ["algebra", "check", "heisenberg3.json"])
    rep = json.loads(out)
    assert code == 0
    v = rep["verdicts"]
    assert v["jacobi"] == "ok" and v["nilpotent"] is True and v["grading"] == "graded_carnot"
    assert rep["inputs"][0]["name"] == "heisenberg3.json" and len(rep["inputs"][0]["sha256"]) == 64


def test_heisenberg_additivity_command(capsys):
    argv = ["spectrum", "verify", "smale_unstable.json", "--algebra", "heisenberg3.json", "--theorem", "heis"]
    code, out, _ = run(capsys, argv)
    v = json.loads(out)["verdicts"]
    assert code == 0 and v["holds"] and v["n"] == 1 and v["deviation"] == 0.0


def test_asymmetry_command(capsys):
    code, out, _ = run(capsys, ["algebra", "asymmetry", "heisenberg3.json"])
    v = json.loads(out)["verdicts"]
    assert code == 1 and v["verdict"] == "not_asymmetric" and v["certificate"]["validated"]


def test_cone_command(capsys):
    code, out, _ = run(capsys, ["cone", "compute", "heisenberg_model.json"])
    assert code == 0
    assert json.loads(out)["verdicts"]["algebra"]["brackets"] == [{"i": 0, "j": 1, "out": {"2": "1"}}]


def test_anosov_failure_names_certificate(capsys):
    code, out, _ = run(capsys, ["anosov", "build", "--algebra", "heisenberg3.json", "--lambda", "3/2+r", "--field", "3"])
    assert code == 1
    assert json.loads(out)["verdicts"]["failed_certificate"] == "integrality"


def test_field_mismatch_exit_2(capsys, tmp_path):
    alg = tmp_path / "h3_sqrt2.json"
    alg.write_text(cio.dumps(cio.algebra_to_json(heisenberg(field=2))))
    code, out, err = run(capsys, ["spectrum", "verify", "smale_unstable.json", "--algebra", str(alg), "--theorem", "heis"])
    assert code == 2 and out == "" and "error" in err


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(capsys, ["algebra", "check", str(bad)])[0] == 2
    assert run(capsys, ["algebra", "check", str(tmp_path / "missing.json")])[0] == 2
    assert run(capsys, ["algebra", "frobnicate", "heisenberg3.json"])[0] == 2
    assert run(capsys, ["nonsense"])[0] == 2


def test_out_file_and_table(capsys, tmp_path):
    out_file = tmp_path / "rep.json"
    code, out, _ = run(capsys, ["algebra", "check", "filiform_r3.json", "--out", str(out_file)])
    assert out_file.read_text() == out
    code, table, _ = run(capsys, ["algebra", "check", "filiform_r3.json", "--format", "table"])
    assert "graded_carnot" in table and not table.lstrip().startswith("{")


def test_timing_flag(capsys):
    _, out, _ = run(capsys, ["algebra", "check", "heisenberg3.json", "--timing"])
    assert json.loads(out)["wall_time"] >= 0


def test_reports_are_byte_stable(capsys):
    argv = ["lyapunov", "estimate", "--system", "sqrt2", "--iters", "500", "--eps", "0.01", "--seed", "3"]
    assert run(capsys, argv)[1] == run(capsys, argv)[1]


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "carnot.cli", "algebra", "check", "heisenberg3.json"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["status"] == "verified"
