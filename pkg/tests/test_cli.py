import csv
import io
import json
import shutil
import subprocess

import numpy as np
import pytest

from matchedpair import __version__
from matchedpair.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_check_single_suite_json(capsys):
    code, out, err = run(["check", "--suite", "group_axioms", "--instance", "su2k",
                          "--samples", "50", "--seed", "42"], capsys)
    assert code == 0
    doc = json.loads(out)
    rep = doc["reports"][0]
    for key in ("suite", "instance", "samples", "seed", "tolerance", "max_residual", "pass",
                "worst_input"):
        assert key in rep
    assert rep["pass"] and rep["seed"] == 42
    assert "config" in err and "tolerance group_axioms" in err and __version__ in err


def test_check_failure_exits_one(capsys):
    code, out, err = run(["check", "--suite", "printed_system", "--samples", "5"], capsys)
    assert code == 1
    assert not json.loads(out)["reports"][0]["pass"]
    assert "finding" in err


def test_check_all_small_instance_with_sign_resolution(capsys):
    code, out, _ = run(["check", "--instance", "abelian:2", "--samples", "3", "--format", "json"],
                       capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["sign_resolution"]["status"].startswith("indeterminate")


def test_check_csv(capsys, tmp_path):
    target = tmp_path / "r.csv"
    code, out, _ = run(["check", "--suite", "degeneration", "--samples", "5", "--format", "csv",
                        "--out", str(target)], capsys)
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert rows[0]["suite"] == "degeneration" and rows[0]["pass"] == "True"


@pytest.mark.parametrize("argv,code,prefix", [
    (["check", "--suite", "group_axioms", "--instance", "nosuch"], 2, "ERROR:unknown-instance:"),
    (["check", "--suite", "nosuch"], 2, "ERROR:usage:"),
    (["check", "--suite", "printed_system", "--instance", "heisenberg"], 2, "ERROR:usage:"),
    (["check", "--seed", "-1"], 2, "ERROR:usage:"),
    (["check", "--samples", "0"], 2, "ERROR:usage:"),
    (["check", "--tol", "abc"], 2, "ERROR:usage:"),
    (["frobnicate"], 2, "ERROR:usage:"),
    (["simulate"], 2, "ERROR:usage:"),
    (["simulate", "--config", "/nonexistent/cfg.json"], 3, "ERROR:io:"),
])
def test_error_codes(capsys, argv, code, prefix):
    got, _, err = run(argv, capsys)
    assert got == code
    assert err.strip().splitlines()[-1].startswith(prefix)


def test_bad_config_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = run(["simulate", "--config", str(p)], capsys)
    assert code == 2 and "ERROR:usage:" in err
    cfg = write_config(tmp_path, {"system": "ep", "instance": "su2k"})
    code, _, err = run(["simulate", "--config", cfg, "--out", str(tmp_path / "no" / "x.csv")],
                       capsys)
    assert code == 3 and "ERROR:io:" in err


def test_simulate_abelian_spline_is_cubic(capsys, tmp_path):
    cfg = write_config(tmp_path, {
        "instance": "abelian:2", "system": "spline", "t_final": 1.0, "h": 0.01,
        "position": True, "output_stride": 10,
        "initial": {"xi": [1, -1], "eta": [0.5, 2], "xid": [0.25, 0], "etad": [-3, 1],
                    "xidd": [0.5, 0.5], "etadd": [1, 2]}})
    out = tmp_path / "traj.csv"
    code, _, _ = run(["simulate", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    header, data = rows[0], np.array(rows[1:], dtype=float)
    assert header[:3] == ["t", "xi_1", "xi_2"] and header[-1] == "q_4"
    t = data[:, 0]
    for j in range(1, 5):
        coef = np.polyfit(t, data[:, j], 3)
        assert np.abs(np.polyval(coef, t) - data[:, j]).max() < 1e-12
    first = out.read_text()
    run(["simulate", "--config", cfg, "--out", str(out)], capsys)
    assert out.read_text() == first


def test_simulate_flags_override_config(capsys, tmp_path):
    cfg = write_config(tmp_path, {"instance": "su2k", "system": "ep", "t_final": 1.0})
    code, out, _ = run(["simulate", "--config", cfg, "--t-final", "0.05", "--dt", "0.01",
                        "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["t", "xi_1", "xi_2", "xi_3"]
    assert doc["rows"][-1][0] == pytest.approx(0.05)


def test_simulate_divergence(capsys, tmp_path):
    cfg = write_config(tmp_path, {"instance": "su2k", "system": "ep", "t_final": 50.0, "h": 0.5,
                                  "lagrangian": {"blocks": {"A": [1, 1e-9, 1e9]}},
                                  "initial": [1e3, 1e3, 1e3]})
    code, _, err = run(["simulate", "--config", cfg], capsys)
    assert code == 1 and "ERROR:diverged:" in err


@pytest.mark.parametrize("system", ["soep", "msoep"])
def test_verify_trajectory(capsys, tmp_path, system):
    cfg = write_config(tmp_path, {"instance": "su2k", "system": system, "t_final": 0.3,
                                  "h": 0.005, "output_stride": 2, "seed": 1,
                                  "suites": ["degeneration"]})
    code, out, _ = run(["verify", "--config", cfg, "--samples", "5"], capsys)
    doc = json.loads(out)
    assert code == 0, doc
    names = [r["suite"] for r in doc["reports"]]
    assert names == ["trajectory", "degeneration"]
    checks = doc["reports"][0]["details"]
    assert "consistency" in checks
    assert ("second_order_euler_lagrange" if system == "soep" else "matched_euler_lagrange") in checks


def test_version(capsys):
    code, out, _ = run(["--version"], capsys)
    assert code == 0 and __version__ in out


@pytest.mark.skipif(shutil.which("matchedpair") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["matchedpair", "check", "--suite", "group_axioms", "--instance", "nosuch"],
                       capture_output=True, text=True)
    assert p.returncode == 2
    assert p.stderr.strip().splitlines()[-1].startswith("ERROR:unknown-instance:")
