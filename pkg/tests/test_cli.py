import json
import shutil
import subprocess

import pytest

from fountain_exponents.cli import main
from fountain_exponents.curves import RATE_HEADER, read_curve


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exponents_writes_curves_deterministically(tmp_path, capsys):
    args = ["exponents", "--curves", "efc,ec", "--rates", "0.3c,0.5c"]
    code, out, _ = run(capsys, *args, "--out", str(tmp_path / "a"))
    assert code == 0
    first = json.loads(out.splitlines()[0])  # resolved config is echoed first
    assert first["resolved_config"]["curve"] == "efc"
    run(capsys, *args, "--out", str(tmp_path / "b"))
    a = (tmp_path / "a" / "efc.csv").read_text()
    assert a == (tmp_path / "b" / "efc.csv").read_text()
    assert a.splitlines()[0].startswith("# config_hash=")
    assert ",".join(RATE_HEADER) in a
    cols = read_curve(tmp_path / "a" / "efc.csv")
    assert cols["exponent_nats"][0] > cols["exponent_nats"][1] > 0


def test_exponents_gamma_curves(tmp_path, capsys):
    code, _, _ = run(capsys, "exponents", "--curves", "efcs,efc_gamma", "--gammas", "0.5,0.9",
                     "--out", str(tmp_path))
    assert code == 0
    s = read_curve(tmp_path / "efcs.csv")["exponent_nats"]
    o = read_curve(tmp_path / "efc_gamma.csv")["exponent_nats"]
    assert all(a <= b + 1e-9 for a, b in zip(s, o))


@pytest.mark.parametrize("argv,code", [
    (["exponents", "--bogus"], 1),
    (["exponents", "--curves", "nope"], 1),
    (["exponents", "--channel", "bsc:x"], 1),
    (["exponents", "--channel", "bsc:0.5", "--curves", "efcs"], 2),
    (["exponents", "--rates", "0.5"], 2),
    (["exponents", "--rates", "1.2c"], 2),
    (["simulate", "--schedule", "burst"], 1),
    (["simulate", "--rate-compatible", "L=2,known=2"], 1),
    (["simulate", "--n-i", "10"], 2),
    (["simulate", "--n-o", "300"], 1),
])
def test_exit_codes(tmp_path, capsys, argv, code):
    got, _, err = run(capsys, *argv, "--out", str(tmp_path))
    assert got == code
    assert err


def test_simulate_small_sweep(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--n-o", "15", "--k-o", "11", "--field-bits", "4", "--n-i", "11",
                       "--factors", "1,2", "--trials", "100", "--out", str(tmp_path),
                       "--transcript", str(tmp_path / "t.jsonl"))
    assert code == 0
    assert "N=165 " in out and "N=330 " in out
    assert (tmp_path / "sweep.csv.manifest.json").exists()
    assert len((tmp_path / "t.jsonl").read_text().splitlines()) == 200


def test_simulate_starve_schedule(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--n-o", "15", "--k-o", "11", "--field-bits", "4", "--n-i", "11",
                       "--factors", "1.5", "--trials", "100", "--schedule", "starve:0.1", "--out", str(tmp_path))
    assert code == 0
    man = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
    assert man["schedule"] == {"kind": "per_code_starve", "param": 0.1}


def test_simulate_rate_compatible(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "--n-o", "15", "--k-o", "11", "--field-bits", "4", "--n-i", "22",
                     "--rate-compatible", "L=2,known=1", "--factors", "1", "--trials", "100",
                     "--out", str(tmp_path))
    assert code == 0
    (row,) = json.loads((tmp_path / "equivalence.json").read_text())
    assert row["n_rc"] == row["n_baseline"] == 165
    assert 0 <= row["p_value"] <= 1


def test_verify_single_suite_and_negative_control(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--suite", "saddle", "--ro", "0.75", "--out", str(tmp_path / "r.json"))
    assert code == 0 and "[PASS] saddle" in out
    report = json.loads((tmp_path / "r.json").read_text())
    assert report[0]["passed"]
    code, _, err = run(capsys, "verify", "--suite", "saddle", "--ro", "0.75", "--tol", "1e-12")
    assert code == 3 and "FAILED saddle" in err


@pytest.mark.skipif(shutil.which("fountain-exponents") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["fountain-exponents", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout
