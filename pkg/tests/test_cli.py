import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from normalforms.cli import main, run

SYSTEMS = Path(__file__).resolve().parents[1] / "scripts" / "systems"
PLANAR = str(SYSTEMS / "planar_real.json")
RES12 = str(SYSTEMS / "resonant_12.json")
NODE23 = str(SYSTEMS / "node_23.json")


def _write(tmp_path, obj, name="sys.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def _system(lam, terms=(), order=3, **extra):
    return {"schema_version": 1, "n": len(lam), "eigenvalues": lam, "order": order, "terms": list(terms), **extra}


# -- resonances ------------------------------------------------------------------
def test_resonances_nonresonant_node():
    code, out, _ = run(["resonances", NODE23])
    assert code == 0 and out["resonances"] == [] and out["schema_version"] == 1


def test_resonances_one_relation():
    code, out, _ = run(["resonances", RES12])
    assert code == 0
    assert out["resonances"] == [{"m": [2, 0], "r": 2, "order": 2}]


@pytest.mark.parametrize("payload", [
    "{not json",
    json.dumps({"n": 2, "eigenvalues": [["1", "0"]], "order": 2, "terms": []}),
    json.dumps(_system([["1", "0"], ["2", "0"]], [{"m": [1, 0], "r": 1, "c": ["1", "0"]}])),
    json.dumps(_system([["1", "0"], ["2", "0"]], [{"m": [2, 0], "r": 3, "c": ["1", "0"]}])),
])
def test_malformed_input_exits_2(tmp_path, payload):
    code, out, _ = run(["resonances", _write(tmp_path, payload)])
    assert code == 2 and out["error"] == "input" and out["schema_version"] == 1


def test_missing_file_exits_2():
    code, _, _ = run(["resonances", "/nonexistent/system.json"])
    assert code == 2


# -- normalize -------------------------------------------------------------------
@pytest.mark.parametrize("flavor", ["pd", "prf", "lrf"])
def test_normalize_planar(flavor):
    code, out, _ = run(["normalize", "--flavor", flavor, PLANAR])
    assert code == 0
    assert out["flavor"] == flavor.upper() and out["check"]["ok"]
    assert "normal_form_real" in out
    real = out["normal_form_real"]
    assert all(t["c"][1] == "0" for t in real["terms"])


def test_lrf_refusal_exits_3():
    code, out, _ = run(["lrf", RES12])
    assert code == 3 and out["error"] == "not_applicable" and out["grade"] == 1


def test_prf_alias_and_order_override():
    code, out, _ = run(["prf", "--order", "3", PLANAR])
    assert code == 0 and out["order"] == 3 and out["flavor"] == "PRF"


def test_normalize_node_is_linear():
    code, out, _ = run(["normalize", NODE23])
    assert code == 0
    assert all(sum(t["m"]) == 1 for t in out["normal_form"]["terms"])


def test_float_backend(tmp_path):
    code, out, _ = run(["normalize", "--backend", "float", "--flavor", "pd", RES12])
    assert code == 0 and out["check"]["ok"]


# -- diagnostics -------------------------------------------------------------------
def test_diagnose_node():
    code, out, _ = run(["diagnose", "--cap", "6", RES12])
    assert code == 0 and out["poincare"] is True
    assert [e["order"] for e in out["scan"]] == [2, 3, 4, 5, 6]
    assert out["siegel"]["status"] == "empirical"
    assert set(out) >= {"bruno", "condition_a"}


def test_diagnose_rotation_not_poincare():
    code, out, _ = run(["diagnose", PLANAR])
    assert code == 0 and out["poincare"] is False


def test_bound_from_flags_and_file(tmp_path):
    code, out, _ = run(["bound", "--C", "1", "--M", "1", "--eps", "1", "--mu", "1", "--delta", "1"])
    assert code == 0 and math.isclose(out["t0"], math.log(2), abs_tol=1e-12)
    params = _write(tmp_path, {"C": 2, "M": 3, "eps": 0.1, "mu": 2, "delta": 0.05}, "b.json")
    code, out, _ = run(["bound", params])
    assert code == 0 and math.isclose(out["rho_bound"]["b"], 0.03)
    code, _, _ = run(["bound", "--C", "1"])
    assert code == 2


def test_bound_with_trajectory_check():
    code, out, _ = run(["bound", "--C", "1", "--M", "8", "--eps", "1", "--delta", "0.1",
                        "--system", PLANAR, "--x0", "0.3,0.2", "--T", "0.5", "--steps", "200"])
    assert code == 0 and out["verify"]["ok"] and out["verify"]["samples"] > 0
    code, _, _ = run(["bound", "--C", "1", "--M", "1", "--eps", "1", "--system", PLANAR])
    assert code == 2


def test_verify_scaling_exponent():
    code, out, _ = run(["verify", "--order", "3", "--x0", "0.6,0.8", "--scales", "0.1", "0.05", "0.025",
                        "--T", "1", "--steps", "400", PLANAR])
    assert code == 0 and out["expected_exponent"] == 5
    assert out["min_exponent"] >= 4.5


# -- plumbing ----------------------------------------------------------------------
def test_pretty_output(capsys):
    assert main(["normalize", "--output", "pretty", "--flavor", "pd", RES12]) == 0
    text = capsys.readouterr().out
    assert "schema_version: 1" in text and "flavor: PD" in text


def test_errors_go_to_stderr(capsys):
    assert main(["lrf", RES12]) == 3
    captured = capsys.readouterr()
    assert captured.out == "" and '"not_applicable"' in captured.err


def test_selftest():
    code, out, _ = run(["selftest", "--seed", "3"])
    assert code == 0 and out["ok"] and len(out["checks"]) == 4


def test_module_entry_point_reads_stdin():
    text = Path(RES12).read_text()
    proc = subprocess.run([sys.executable, "-m", "normalforms", "resonances", "-"], input=text,
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["resonances"][0]["m"] == [2, 0]
