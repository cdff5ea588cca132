import json
import os
import subprocess
from pathlib import Path

import pytest

HERE = Path(__file__).parent
BIN = os.environ.get("HEATLAB_BIN", "heatlab")


def run(sub, cfg, out, *extra):
    return subprocess.run([BIN, sub, "--config", str(HERE / cfg), "--out", str(out), *extra],
                          capture_output=True, text=True)


@pytest.mark.parametrize(
    "sub,cfg,code",
    [
        ("osgood", "osgood_power2.ini", 0),
        ("osgood", "osgood_mismatch.ini", 1),
        ("schedule", "schedule_r2.ini", 0),
        ("evolve", "evolve_probe.ini", 0),
        ("estimate", "estimate_outside.ini", 1),
        ("osgood", "broken.ini", 2),
        ("osgood", "missing.ini", 2),
        ("schedule", "osgood_power2.ini", 2),
        ("report", "report.ini", 0),
    ],
)
def test_exit_codes(tmp_path, sub, cfg, code):
    r = run(sub, cfg, tmp_path)
    assert r.returncode == code, r.stderr
    if code != 2:
        assert (tmp_path / "results.json").exists()
        assert (tmp_path / "plot.gp").exists()


def test_usage_errors(tmp_path):
    assert subprocess.run([BIN], capture_output=True).returncode == 2
    assert run("osgood", "osgood_power2.ini", tmp_path, "--threads", "0").returncode == 2
    assert run("osgood", "osgood_power2.ini", tmp_path, "--tol", "abc").returncode == 2


def test_osgood_verdict(tmp_path):
    assert run("osgood", "osgood_power2.ini", tmp_path).returncode == 0
    res = json.loads((tmp_path / "results.json").read_text())
    assert res["verdict"] == "Divergent"
    assert res["growth"]["numeric_agrees"]


def test_schedule_rows(tmp_path):
    assert run("schedule", "schedule_r2.ini", tmp_path).returncode == 0
    res = json.loads((tmp_path / "results.json").read_text())
    assert res["terminated"] and res["rows"] == 64
    lines = (tmp_path / "schedule.csv").read_text().splitlines()
    assert lines[0] == "i,R_i,ln_R_i,tau_i,step_i,ln_bound_term"
    assert len(lines) == 65


def test_example_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("example", "example_i2.ini", a, "--seed", "3").returncode == 0
    assert run("example", "example_i2.ini", b, "--seed", "3", "--threads", "2").returncode == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == ["membership.csv", "plot.gp", "quadratic.csv", "results.json", "spikes.csv"]
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
    res = json.loads((a / "results.json").read_text())
    assert res["passed"]
    assert all(res["checks"].values())
