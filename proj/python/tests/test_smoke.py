import math

import pytest

import oqs_apo


def test_version():
    assert oqs_apo.__version__ == "0.1.0"


def test_exact_coherence_is_shifted_gaussian():
    xs = [0.0, 0.5, 1.0, 2.0]
    z = oqs_apo.coherence("exact", xs, r=1.0)
    for x, v in zip(xs, z):
        assert abs(v - 0.5 * math.exp(-0.5 * (x - 1.0) ** 2)) < 1e-12


def test_product_state_methods_agree():
    xs = [0.0, 1.0, 3.0]
    e = oqs_apo.coherence("exact", xs, r=0.0)
    a = oqs_apo.coherence("apo2", xs, r=0.0)
    assert max(abs(p - q) for p, q in zip(e, a)) < 1e-12


def test_entropy_limits():
    assert oqs_apo.entanglement_entropy(0.0) == pytest.approx(0.0, abs=1e-15)
    assert oqs_apo.entanglement_entropy(10.0) == pytest.approx(math.log(2.0), rel=1e-12)


def test_damped_asymptote():
    value, converged = oqs_apo.damped_asymptote("apo2", 0.5, 3.0)
    assert converged
    assert value == pytest.approx(1.5 / 4.0, rel=1e-5)


def test_run_point_and_errors():
    t = oqs_apo.run_point({
        "model.kind": "dephasing",
        "model.methods": "exact, tcl2",
        "dephasing.r": "1",
        "grid.t_max": "4",
        "grid.n_points": "41",
    })
    assert t["time_label"] == "xi_sigma_t"
    assert len(t["time"]) == 41
    assert set(t) >= {"exact", "tcl2"}
    assert len(t["tcl2"]["rho10"]) == 41
    with pytest.raises(oqs_apo.ConfigError):
        oqs_apo.run_point({"model.kind": "dephasing", "model.methods": ""})


def test_figures_and_criterion():
    assert "fig2" in oqs_apo.figure_names()
    ok, line = oqs_apo.criterion(10)
    assert ok
    assert line.startswith("PASS")
