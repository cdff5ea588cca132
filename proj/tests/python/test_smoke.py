import json
import math

import pytest

import heatlab


def test_logscalar_roundtrip():
    x = heatlab.LogScalar.from_real(-2.5)
    assert x.sign == -1
    assert x.ln == pytest.approx(math.log(2.5))
    assert float(x) == pytest.approx(-2.5)
    big = heatlab.LogScalar.from_log(1000.0) * heatlab.LogScalar.from_log(1000.0)
    assert big.ln == pytest.approx(2000.0)


def test_heat_kernel_at_origin():
    for n in (1, 2, 3):
        k = heatlab.heat_kernel(n, 0.0, 0.25)
        assert float(k) == pytest.approx(math.pi ** (-n / 2))


def test_osgood_and_schedule():
    assert heatlab.classify_osgood("[growth]\nfamily=power C=1 beta=2\n")["verdict"] == "Divergent"
    assert heatlab.classify_osgood("[growth]\nfamily=power C=1 beta=2.5\n")["verdict"] == "Convergent"
    s = heatlab.build_schedule("[schedule]\ntau0 = 1\n")
    assert s["terminated"] and s["steps_used"] == 64
    assert heatlab.cutoff_constant(2) == 256


def test_bad_config_raises():
    with pytest.raises(heatlab.ConfigError):
        heatlab.classify_osgood("[growth]\nfamily=nope\n")
    with pytest.raises(ValueError):
        heatlab.Solution("[data]\nbase = gaussian\nsigma = -1\n")


def test_gaussian_solution():
    sol = heatlab.Solution("[data]\nn = 3\nbase = gaussian\nA = 1\nsigma = 0.5\n")
    t = 0.1
    v = 0.25 + 2 * t
    u = sol.evolve_point(0.3, 0.0, t)
    assert float(u) == pytest.approx((0.25 / v) ** 1.5 * math.exp(-0.09 / (2 * v)), rel=1e-8)
    rep = sol.spacetime_integral(0.0, 1.0, p=2.0, a=0.0)
    assert rep["value"]["sign"] == 1
    assert rep["quadrature_error_estimate"] < 1e-5
    assert not sol.vanishing_probe()["vanishing"]
    zero = heatlab.Solution("[data]\nbase = zero\n")
    assert zero.vanishing_probe()["vanishing"]


def test_spikes():
    ln_r, ln_rt = heatlab.spike_radii(3, 1)
    assert ln_r == pytest.approx(-0.81080, abs=1e-5)
    assert ln_rt == pytest.approx(ln_r - math.log(2) / 3)
    b = heatlab.integral_lower_bound(3, 2)
    assert b["exact"].ln >= b["floor"].ln
    sol = heatlab.Solution("[data]\nsection3 n=3 i_max=2\n")
    assert sol.spike_count == 2


def test_cli_run_is_deterministic(tmp_path):
    cfg = tmp_path / "osgood.ini"
    cfg.write_text("[growth]\nfamily=power, C=1, beta=2\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        status, diag = heatlab.run("osgood", cfg, out)
        assert status == 0, diag
        outs.append((out / "results.json").read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["verdict"] == "Divergent"
    status, _ = heatlab.run("osgood", tmp_path / "missing.ini", tmp_path / "x")
    assert status == 2
