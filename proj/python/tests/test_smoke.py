import math

import numpy as np
import pytest

import nullwave


def test_catalog_and_null_verdicts():
    names = nullwave.catalog_names()
    assert "semilinear-null" in names and "nonnull-riccati" in names
    assert nullwave.check_null("quasilinear-null")["null_conditions_hold"] is True
    assert nullwave.check_null("nonnull-riccati")["null_conditions_hold"] is False


def test_weights_match_brackets():
    phi, theta = nullwave.phi_theta(3.0, 0.5)
    assert phi == pytest.approx(10.0 ** 1.5)
    assert theta == pytest.approx(phi**3)


def test_config_defaults_and_errors():
    cfg = nullwave.config(L=80, Nx=512)
    assert cfg["L"] == 80 and cfg["Nx"] == 512
    assert cfg["dissipation"] == nullwave.DEFAULT_DISSIPATION
    with pytest.raises(ValueError, match="line 1"):
        nullwave.config(delta=1.5)
    with pytest.raises(ValueError):
        nullwave.config(bogus=1)


def test_linear_solve_matches_dalembert():
    s = nullwave.solve(model="linear", calibration="amplitude", epsilon=1.0, center=20, width=2,
                       L=60, Nx=1024, T_final=5)
    x, t = s["x"], s["t_end"]
    exact = 0.5 * (np.exp(-(((x - t) - 20) / 2) ** 2) + np.exp(-(((x + t) - 20) / 2) ** 2))
    assert s["u"].shape == (x.size, 2)
    assert np.max(np.abs(s["u"][:, 0] - exact)) < 1e-4
    assert s["u"][0, 0] == 0.0
    assert not s["blowup"]


def test_energies_stay_bounded_and_checks_pass():
    e = nullwave.energies(model="semilinear-null", calibration="amplitude", epsilon=0.01,
                          L=60, Nx=512, T_final=20, stride=20)
    assert e["E"].shape[1] == 4 and e["E"].shape[0] == e["t"].size
    assert np.all(np.isfinite(e["E"]))
    assert e["E"][:, 3].max() / e["E"][0, 3] < 1.1
    assert e["checks"]["split_max_rel"] < 1e-10
    assert e["flux"]["high_violations"] == 0
    assert math.isfinite(e["Q"])


def test_riccati_blowup_sweep(tmp_path):
    code, report = nullwave.sweep("blowup", model="nonnull-riccati", calibration="amplitude",
                                  epsilon=[0.4, 0.2, 0.1], center=20, L=60, Nx=1024, T_final=20)
    assert code == 0
    assert report["verdict"] == "pass"
    tb = report["t_blowup"]
    assert tb[1] / tb[0] == pytest.approx(2.0, rel=0.05)
    assert tb[2] / tb[1] == pytest.approx(2.0, rel=0.05)


def test_subcommand_writes_artifacts(tmp_path):
    code, log = nullwave.run_subcommand("check-null", tmp_path, model="linear")
    assert code == 0 and "linear" in log
    assert (tmp_path / "verdict.json").exists()
