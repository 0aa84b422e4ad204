import math

import numpy as np
import pytest

import rfi


def test_operators():
    p = rfi.line_projector(0.0)
    np.testing.assert_allclose(p(np.array([1.0, 2.0])), [1.0, 0.0])
    assert p.is_projector
    assert p.averaged_constant == 0.5
    assert rfi.huber(1.0).averaged_constant is None
    assert rfi.interval_projector(0.2)(np.array([2.0]))[0] == pytest.approx(0.7)
    x = np.array([0.3, -0.4])
    y = rfi.exp_prox()(x)
    np.testing.assert_allclose((1 + 2 * math.exp(-y @ y)) * y, x, atol=1e-12)
    with pytest.raises(rfi.DimensionError):
        p(np.array([1.0, 2.0, 3.0]))


def test_closed_forms():
    assert rfi.kappa_lines(math.pi / 2) == pytest.approx(5.503876787768217, rel=1e-12)
    assert rfi.rate_bound(5.503876787768217, 0.5) == pytest.approx(0.904604823214972, rel=1e-12)
    assert rfi.merit_intervals(0.1, 1.0) == pytest.approx(0.303333333333333, rel=1e-12)
    assert rfi.disk_feasibility(0.5, 1.0) == pytest.approx(0.4195693767448338, rel=1e-12)
    assert rfi.epsilon_budget(11.0063, 0.5, 0.5, 1e-3, 0.05) == 226


def test_bundled_scenario_runs():
    assert "halfspaces_03_07" in rfi.bundled_scenarios()
    sc = rfi.load_scenario("halfspaces_03_07")
    res = rfi.run_scenario(sc, threads=2)
    assert res["passed"] and res["exit_code"] == 0
    assert "steps.csv" in res["files"]
    again = rfi.run_scenario(sc, threads=1)
    assert again["files"] == res["files"]


def test_config_error():
    with pytest.raises(rfi.ConfigError, match="unknown section"):
        rfi.parse_scenario("[mystery]\nx = 1\n")


def test_run_writes_files(tmp_path):
    sc = rfi.load_scenario("rotation_nonconvergence")
    res = rfi.run_scenario(sc, seed=3, out_dir=str(tmp_path), write_files=True)
    assert (tmp_path / "steps.csv").read_text() == res["files"]["steps.csv"]


def test_integral_equation():
    r = rfi.solve_integral_equation("indicator", "half_square", nodes=51, iterations=2000, seed=1)
    assert len(r["solution"]) == 51
    assert len(r["l2_residual"]) == 2001
    assert r["l2_residual"][-1] < r["l2_residual"][0]
