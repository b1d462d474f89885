import json

import numpy as np
import pytest

from emtransfer.cli import main
from emtransfer.toymodel import OperatorField, QuantumModel, random_field


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_model_gen_and_run(tmp_path, capsys):
    path = tmp_path / "m.json"
    code, _, _ = run_cli(capsys, "model", "gen", "--kind", "lattice", "--dim", "6", "--out", str(path))
    assert code == 0
    model = QuantumModel.load(path)
    assert model.dim == 6
    code, out, _ = run_cli(capsys, "model", "run", "--model", str(path), "--k", "1.5")
    assert code == 0
    doc = json.loads(out)
    assert doc["dim"] == 6 and doc["minus_on_zero_energy"] <= 1e-12


def test_model_run_with_operator_file(tmp_path, capsys):
    mpath, opath = tmp_path / "m.json", tmp_path / "b.json"
    run_cli(capsys, "model", "gen", "--dim", "5", "--seed", "2", "--out", str(mpath))
    model = QuantumModel.load(mpath)
    b = random_field(model, np.random.default_rng(0))
    opath.write_text(json.dumps({"matrix": b.matrix_json()}))
    code, out, _ = run_cli(capsys, "model", "run", "--model", str(mpath), "--operator", str(opath))
    assert code == 0
    assert json.loads(out)["norm"] == pytest.approx(b.norm())


def test_model_gen_to_stdout(capsys):
    code, out, _ = run_cli(capsys, "model", "gen", "--dim", "3")
    assert code == 0 and len(json.loads(out)["spectrum"]) == 3


def test_verify_dyadic_prints_table(capsys):
    code, out, _ = run_cli(capsys, "verify", "dyadic", "--k", "2", "--N", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,N,ratio,expected,tolerance,pass"
    assert lines[1].startswith("2.0,2,0.0625")
    assert lines[-1].startswith("PASS")


def test_verify_trials_and_outputs(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code, out, _ = run_cli(capsys, "verify", "appendix-c", "--trials", "25", "--seed", "3", "--out", str(out_dir))
    assert code == 0 and "PASS appendix-c" in out
    doc = json.loads((out_dir / "result.json").read_text())
    assert doc["config"]["params"]["appendix-c"]["trials"] == 25
    code, text, _ = run_cli(capsys, "report", str(out_dir))
    assert code == 0 and "| appendix-c | 1/1 |" in text


def test_verify_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"suites": ["buchholz"], "params": {"buchholz": {"trials": 20}}}))
    code, out, _ = run_cli(capsys, "verify", "all", "--config", str(cfg))
    assert code == 0 and "in 1 suites" in out


def test_verify_config_error_exit_code(capsys):
    code, _, err = run_cli(capsys, "verify", "thm-bk", "--k", "0.9")
    assert code == 2 and "k > (kappa + 1)/2" in err


def test_verify_failure_exit_code(tmp_path, capsys):
    # the lowering convention breaks annihilation of the ground state by the minus part
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"suites": ["thm-bk"], "params": {"thm-bk": {
        "convention": "lowering", "families": ["lattice"], "fields": 1, "measures": 4}}}))
    code, out, _ = run_cli(capsys, "verify", "all", "--config", str(cfg))
    assert code == 1 and "FAIL" in out


def test_scaling_commands(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "scaling", "estimate", "--out", str(tmp_path / "e.json"))
    assert code == 0
    assert json.loads(out)["estimate"]["degree"] == pytest.approx(-1.0, abs=0.1)
    code, out, _ = run_cli(capsys, "scaling", "classify", "--kappa", "2.5")
    assert json.loads(out) == {"2.5": [{"m": 1, "l": 0, "at_zero": False}, {"m": 4, "l": 0, "at_zero": True}]}
    code, out, _ = run_cli(capsys, "scaling", "bounds", "--m", "4", "--m", "1", "--kappa", "3.5")
    assert json.loads(out) == {"4": {"bare": -4.0, "kappa=3.5": -2.5}, "1": {"bare": -2.5, "kappa=3.5": -1.0}}


def test_scaling_estimate_chart_error(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"q": [2.0, 0.0, 0.0, 0.0]}))
    code, _, err = run_cli(capsys, "scaling", "estimate", "--config", str(cfg))
    assert code == 2 and "configuration error" in err


def test_scaling_estimate_with_model_file(tmp_path, capsys):
    from emtransfer.scaling import engineered_shell_model
    eng = engineered_shell_model()
    mpath, opath, cfg = tmp_path / "m.json", tmp_path / "b.json", tmp_path / "s.json"
    eng.model.save(mpath)
    opath.write_text(json.dumps(eng.field.matrix_json()))
    cfg.write_text(json.dumps({"model": str(mpath), "operator": str(opath)}))
    code, out, _ = run_cli(capsys, "scaling", "estimate", "--config", str(cfg))
    assert code == 0 and json.loads(out)["estimate"]["degree"] == pytest.approx(-1.0, abs=0.1)
    assert OperatorField.from_matrix_json(eng.model, json.loads(opath.read_text())).norm() == eng.field.norm()
