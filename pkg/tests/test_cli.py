import json
import subprocess
import sys

import numpy as np
import pytest

from topophase.cli import main
from topophase.dsl import load_bundled
from topophase.paths import named_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_prepare_x_json(capsys):
    code, out, _ = run(capsys, "prepare", "--state", "x", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["basis"] == ["circular"] * 3
    amps = np.array([complex(*a) for a in data["amps"]])
    want = np.zeros(8)
    want[[0, 3, 5, 6]] = 0.5
    assert np.allclose(amps, want)


def test_prepare_csv_linear(capsys):
    code, out, _ = run(capsys, "prepare", "--state", "ghz", "--basis", "linear", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "label,re,im" and lines[1].startswith("HhH,")


def test_prepare_with_coefficients(capsys):
    code, out, _ = run(capsys, "prepare", "--state", "bghz", "--alpha", "0.6", "--beta", "0,0.8")
    assert code == 0
    amps = json.loads(out)["amps"]
    assert amps[0] == [0.6, 0.0] and amps[7] == [0.0, 0.8]


def test_evolve_single(capsys):
    code, out, _ = run(capsys, "evolve", "--state", "x", "--path", "ux1", "--t", "1.0")
    assert code == 0
    assert json.loads(out) == {"V": 1.0, "Phi": 1.57079633}


def test_evolve_many_and_pi_literal(capsys):
    code, out, _ = run(capsys, "evolve", "--state", "x", "--path", "ux2", "--t", "0", "--t", "1/2")
    assert code == 0
    data = json.loads(out)
    assert data[1] == {"t": 0.5, "V": 0.0, "Phi": None}


def test_evolve_path_file(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text(named_path("UBGHZ").to_json())
    code, out, _ = run(capsys, "evolve", "--state", "ghz", "--path", f"@{f}", "--t", "1")
    assert code == 0 and json.loads(out) == {"V": 1.0, "Phi": 3.14159265}


def test_evolve_csv(capsys):
    code, out, _ = run(capsys, "evolve", "--state", "x", "--format", "csv")
    assert out.splitlines()[0] == "t,V,Phi" and len(out.splitlines()) == 6


def test_state_json_input(capsys, tmp_path):
    code, out, _ = run(capsys, "prepare", "--state", "x")
    f = tmp_path / "x.json"
    f.write_text(out)
    code, out2, _ = run(capsys, "invariants", "--state-json", str(f))
    data = json.loads(out2)
    assert code == 0 and data["tangle"] == 1.0 and data["spectrum"] is None


def test_invariants(capsys):
    code, out, _ = run(capsys, "invariants", "--state", "bghz")
    assert json.loads(out) == {"tangle": 0.75, "purities": [0.625] * 3, "slocc": "GhzClass",
                               "spectrum": [0.0, 3.14159265]}


def test_fringes(capsys, tmp_path):
    target = tmp_path / "f.csv"
    code, out, _ = run(capsys, "fringes", "--state", "x", "--t", "1", "--theta-points", "4",
                       "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[1:] == [
        "0.000000000,1", "1.570796327,0", "3.141592654,1", "4.712388980,2"]
    code, out, _ = run(capsys, "fringes", "--state", "prod-x", "--c0", "2")
    assert json.loads(out)["samples"][0] == 2.0


def test_figures(capsys, tmp_path):
    code, out, _ = run(capsys, "figures", "--out", str(tmp_path / "figs"))
    assert code == 0
    names = sorted(p.name for p in (tmp_path / "figs").iterdir())
    assert names == ["balgor3.csv", "balgor4.csv", "balgor5.csv"]
    first = (tmp_path / "figs" / "balgor4.csv").read_bytes()
    run(capsys, "figures", "--out", str(tmp_path / "again"))
    assert (tmp_path / "again" / "balgor4.csv").read_bytes() == first
    code, _, _ = run(capsys, "figures", "--format", "json", "--out", str(tmp_path / "j"))
    assert json.loads((tmp_path / "j" / "balgor3.json").read_text())["figure"] == "balgor3"


def test_run_script(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    script = tmp_path / "exp.topo"
    script.write_text(load_bundled("ux1") + 'emit invariants "inv.json"\n')
    code, out, _ = run(capsys, "run", str(script))
    assert code == 0
    results = json.loads(out)
    assert [r["emit"] for r in results] == ["phase", "fringes", "invariants"]
    assert results[0]["result"]["topological_phase"] == 1.57079633
    assert json.loads((tmp_path / "inv.json").read_text())["tangle"] == 1.0


def test_run_reports_dsl_errors(capsys, tmp_path):
    script = tmp_path / "bad.topo"
    script.write_text("prepare x\npath { s: raamp(0,1,to=0) }\n")
    code, out, err = run(capsys, "run", str(script))
    assert code == 1 and out == ""
    assert f"{script}:2:11: syntax error" in err


def test_fmt(capsys, tmp_path):
    script = tmp_path / "a.topo"
    script.write_text(load_bundled("ux2"))
    code, _, err = run(capsys, "fmt", "--check", str(script))
    assert code == 1 and "not canonically formatted" in err
    code, canon, _ = run(capsys, "fmt", str(script))
    assert code == 0 and canon.startswith("prepare x\npath {\n")
    code, _, _ = run(capsys, "fmt", "--write", str(script))
    assert script.read_text() == canon
    code, _, _ = run(capsys, "fmt", "--check", str(script))
    assert code == 0


def test_check_passes(capsys):
    code, out, _ = run(capsys, "check", "--fuzz", "300")
    assert code == 0
    lines = out.splitlines()
    assert lines[-1].endswith("checks passed") and "FAIL" not in out
    for formula in ("C0_X_GENERAL", "C1_X_UX1", "C2_X_UX2", "CP_PROD", "C31_GHZ",
                    "C3_BGHZ", "C3P_PRODBGHZ"):
        assert formula in out
    for k in range(1, 12):
        assert f"AC{k} " in out


def test_check_fails_under_impossible_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("TOPOPHASE_TOL", "1e-30")
    code, out, _ = run(capsys, "check", "--fuzz", "10")
    assert code == 1 and "FAIL" in out


def test_validation_errors_exit_1(capsys):
    code, _, err = run(capsys, "prepare", "--state", "bghz", "--alpha", "1", "--beta", "1")
    assert code == 1 and "normalization violated" in err
    code, _, err = run(capsys, "evolve", "--state", "x", "--path", "ux9")
    assert code == 1 and "unknown path" in err
    code, _, err = run(capsys, "prepare", "--state", "bghz", "--alpha", "1")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["prepare"],
    ["prepare", "--state", "x", "--state-json", "f.json"],
    ["prepare", "--state", "w"],
    ["evolve", "--state", "x", "--t", "2*pi"],
    ["prepare", "--state", "x", "--bogus"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
    assert "usage:" in capsys.readouterr().err


def test_console_entry_point_deterministic():
    cmd = [sys.executable, "-m", "topophase.cli", "evolve", "--state", "x", "--path", "ux1"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and b"1.57079633" in a
