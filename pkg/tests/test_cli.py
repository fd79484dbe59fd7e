import json
import subprocess
import sys
from pathlib import Path

import pytest

from statdisc.cli import main

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = sorted((ROOT / "configs").glob("*.json"))
QUAD = ROOT / "configs" / "quadrics"


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_configs_present():
    assert len(CONFIGS) >= 10


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda p: p.stem)
def test_config_pass_and_deterministic(cfg, tmp_path):
    command = json.loads(cfg.read_text())["command"]
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        assert main([command, "--config", str(cfg), "--output", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["status"] == "PASS"
    assert {"command", "version", "input", "parameters", "tolerances", "result"} <= rep.keys()


def test_subprocess_entry_point_is_deterministic():
    cfg = ROOT / "configs" / "verify_hermitian3.json"
    cmd = [sys.executable, "-m", "statdisc", "verify", "--config", str(cfg)]
    r1 = subprocess.run(cmd, capture_output=True, check=False)
    r2 = subprocess.run(cmd, capture_output=True, check=False)
    assert r1.returncode == r2.returncode == 0
    assert r1.stdout == r2.stdout


@pytest.mark.parametrize("argv, code, error", [
    (["verify", "--input", QUAD / "scalar.json", "--a", "0.1", "--tol", "attachment=1e-40",
      "--tol", "pinning=1e-40"], 1, None),
    (["solve-x", "--input", QUAD / "scalar.json", "--a", "0.5", "--b0", "1"], 1, None),
    (["verify"], 2, "InputError"),
    (["verify", "--input", QUAD / "split2.json", "--V", "1,2,3"], 2, "InputError"),
    (["verify", "--input", QUAD / "split2.json", "--tol", "nonsense=1"], 2, "InputError"),
    (["verify", "--input", QUAD / "split2.json", "--tol", "attachment"], 2, "InputError"),
    (["verify", "--input", QUAD / "missing.json"], 2, "InputError"),
    (["scan", "--input", QUAD / "split2.json"], 2, "InputError"),
])
def test_exit_code_contract(capsys, argv, code, error):
    got, rep = run_cli(capsys, *argv)
    assert got == code
    assert rep["status"] == ("FAIL" if code == 1 else "ERROR")
    if error:
        assert rep["error"]["type"] == error


def test_bad_files(capsys, tmp_path):
    nonherm = tmp_path / "nh.json"
    nonherm.write_text(json.dumps({"n": 2, "d": 1, "matrices": [[[[0, 0], [1, 0]], [[0, 0], [0, 0]]]]}))
    code, rep = run_cli(capsys, "check", "--input", nonherm)
    assert code == 2 and rep["error"]["type"] == "NonHermitianInput"
    nan = tmp_path / "nan.json"
    nan.write_text('{"n": 1, "d": 1, "matrices": [[[[NaN, 0]]]]}')
    assert run_cli(capsys, "check", "--input", nan)[0] == 2
    dim = tmp_path / "dim.json"
    dim.write_text(json.dumps({"n": 2, "d": 1, "matrices": [[[[1, 0]]]]}))
    code, rep = run_cli(capsys, "check", "--input", dim)
    assert code == 2 and rep["error"]["type"] == "DimensionMismatch"


def test_no_levi_direction(capsys, tmp_path):
    f = tmp_path / "deg.json"
    f.write_text(json.dumps({"n": 2, "d": 1, "matrices": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]}))
    code, rep = run_cli(capsys, "check", "--input", f, "--trials", "5")
    assert code == 1 and rep["error"]["type"] == "NoDirectionFound"
    assert "best_direction" in rep["error"]


def test_config_command_mismatch(capsys):
    code, rep = run_cli(capsys, "disc", "--config", ROOT / "configs" / "verify_scalar.json")
    assert code == 2


def test_argparse_usage_error(capsys):
    assert main(["no-such-command"]) == 2
    assert main(["verify", "--samples", "many"]) == 2


def test_flags_override_config(capsys):
    code, rep = run_cli(capsys, "verify", "--config", ROOT / "configs" / "verify_scalar.json", "--a", "0.2")
    assert code == 0
    assert rep["parameters"]["a"] == [[0.2, 0.0]]


def test_curated_jacobian_reports(capsys):
    code, rep = run_cli(capsys, "jacobian", "--config", ROOT / "configs" / "jacobian_split_degenerate.json")
    assert code == 0 and rep["result"]["jacobian"]["verdict"] == "singular"
    assert rep["result"]["necessity"] == "CONSISTENT"
    code, rep = run_cli(capsys, "center", "--config", ROOT / "configs" / "center_split_generic.json")
    assert code == 0 and rep["result"]["jacobian"]["verdict"] == "invertible"


def test_disc_fourier_table(capsys):
    code, rep = run_cli(capsys, "disc", "--config", ROOT / "configs" / "disc_hermitian3.json")
    assert code == 0
    four = rep["result"]["fourier"]
    assert len(four["index"]) == len(four["h"]) == rep["result"]["samples"] - 1


def test_solve_x_dump(capsys):
    code, rep = run_cli(capsys, "solve-x", "--config", ROOT / "configs" / "solve_x_scalar.json")
    assert code == 0
    assert {"X", "B", "K", "P", "A_sum"} <= rep["result"]["factorization"].keys()
