import math

import numpy as np
import pytest

import redraw


def test_presets_build():
    names = redraw.preset_names()
    assert "fig2a" in names
    ring = redraw.preset("rewired-ring")
    assert ring.shape == (20, 20)
    assert int((ring > 0).sum()) == 45


def test_simulate_uncoupled_is_linear():
    cfg = redraw.SimConfig()
    cfg.natural_frequencies = [1.2, 1.7]
    cfg.initial_phases = [0.1, -0.4]
    times, phases = redraw.simulate(np.zeros((2, 2)), cfg)
    assert phases.shape == (3001, 2)
    expected = np.array(cfg.initial_phases) + np.outer(times, cfg.natural_frequencies)
    assert np.max(np.abs(phases - expected)) < 1e-9


def test_chain_reconstruction_is_exact():
    truth = redraw.preset("fig2a")
    result = redraw.reconstruct(truth, experiments=50, seed=1)
    assert result["locked"] == 50
    scores = redraw.evaluate(truth, result["post_threshold"])
    assert scores["ppv"] == 100.0
    assert scores["fpr"] == 0.0
    assert scores["counts"]["total"] == 12


def test_filters_match_rule():
    rho = np.zeros((3, 3))
    rho[2, 0], rho[1, 0], rho[2, 1] = 0.3, 0.6, 0.7
    pruned = redraw.dpi_filter(rho, 0.9)
    assert pruned[2, 0] == 0.0 and pruned[1, 0] == 0.6
    assert np.all(redraw.threshold_cut(np.full((2, 2), 0.4) - 0.4 * np.eye(2), 0.5) == 0)


def test_reconstruct_traces_matches_batch_path():
    cfg = redraw.SimConfig()
    cfg.natural_frequencies = [1.3, 1.8]
    cfg.initial_phases = [0.0, 1.0]
    w = np.zeros((2, 2))
    w[1, 0] = 1.0
    times, phases = redraw.simulate(w, cfg)
    out = redraw.reconstruct_traces([phases], times, nu=0.5, mu=0.5)
    assert out["raw"].shape == (2, 2)
    assert out["raw"][1, 0] > out["raw"][0, 1]


def test_edge_list_round_trip():
    w = redraw.erdos_renyi(8, 0.3, 5)
    assert np.array_equal(redraw.parse_edge_list(redraw.format_edge_list(w)), w)


def test_validation_errors_surface_as_value_error():
    with pytest.raises(ValueError, match="self-loop at node 1"):
        redraw.evaluate(np.eye(2), np.zeros((2, 2)))


def test_small_calibration():
    out = redraw.calibrate(4, graphs=3, experiments=2, grid_step=0.1, grid_max=0.9)
    assert len(out["cells"]) == 55
    nu, mu = out["suggestion"]
    assert 0.0 <= mu <= nu <= 0.9


def test_lock_report_synchronized():
    times = [0.01 * k for k in range(3001)]
    phases = np.full((3001, 3), 0.3)
    rep = redraw.lock_report(times, phases)
    assert rep["locked"]
    assert math.isclose(rep["mean"], 0.3)
