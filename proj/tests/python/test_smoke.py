"""Smoke tests for the python module against the CMake-built extension."""

import numpy as np
import pytest

import ncpd


def table1_config():
    cfg = ncpd.ScenarioConfig()
    cfg.h_left = 1
    cfg.h_right = 1
    cfg.n_antennas = 4
    cfg.k_secondary = 6
    return cfg


def test_version_and_surface():
    assert ncpd.__version__
    assert set(ncpd.detectors) == {"cd", "rncp", "dncp", "amf"}


def test_steering_vector():
    v = ncpd.steering_vector(0.0, 4)
    assert v.shape == (4,)
    np.testing.assert_allclose(v, 0.5 * np.ones(4), atol=1e-15)
    w = ncpd.steering_vector(0.3, 9)
    assert abs(np.linalg.norm(w) - 1.0) < 1e-14


def test_clutter_covariance_matches_model():
    cfg = ncpd.ScenarioConfig()
    m = ncpd.clutter_covariance(cfg)
    lags = np.abs(np.subtract.outer(np.arange(8), np.arange(8)))
    expected = np.eye(8) + 100.0 * 0.9**lags
    np.testing.assert_allclose(m, expected, rtol=1e-12)


def test_config_validation_raises():
    cfg = ncpd.ScenarioConfig()
    cfg.clutter_rho = 1.5
    with pytest.raises(ValueError):
        cfg.validate()


def test_synthesis_shapes_and_determinism():
    cfg = table1_config()
    a = ncpd.synthesize_dataset(cfg, "h1", 15.0, seed=9)
    b = ncpd.synthesize_dataset(cfg, "h1", 15.0, seed=9)
    c = ncpd.synthesize_dataset(cfg, "h1", 15.0, seed=10)
    assert a.z_cut.shape == (4,)
    assert a.z_omega.shape == (4, cfg.h_window() - 1)
    assert a.r_secondary.shape == (4, 6)
    np.testing.assert_array_equal(a.z_cut, b.z_cut)
    np.testing.assert_array_equal(a.r_secondary, b.r_secondary)
    assert not np.array_equal(a.z_cut, c.z_cut)
    assert a.hypothesis == "h1"
    assert a.truth_alpha.real > 0


def test_amf_statistic_against_numpy():
    rng = np.random.default_rng(5)
    n = 5
    a = rng.normal(size=(n, 2 * n)) + 1j * rng.normal(size=(n, 2 * n))
    m_hat = (a @ a.conj().T) / (2 * n)
    m_hat = 0.5 * (m_hat + m_hat.conj().T)
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    v = ncpd.steering_vector(0.2, n)
    expected = abs(v.conj() @ np.linalg.solve(m_hat, z)) ** 2 / (
        v.conj() @ np.linalg.solve(m_hat, v)
    ).real
    assert ncpd.amf_statistic(z, v, m_hat) == pytest.approx(expected, rel=1e-10)


def test_detector_statistics_and_monotone_traces():
    cfg = table1_config()
    data = ncpd.synthesize_dataset(cfg, "h1", 20.0, seed=3)
    m_hat = ncpd.sample_covariance(data.r_secondary)
    v = ncpd.steering_vector(0.0, cfg.n_antennas)
    w = ncpd.whiten(m_hat, data.z_cut, data.z_omega, v)

    for statistic in (ncpd.rncp_statistic, ncpd.dncp_statistic):
        out = statistic(w)
        assert np.isfinite(out.statistic)
        assert out.iterations_run == cfg.max_iterations
        trace = np.asarray(out.objective_trace)
        slack = 1e-9 * np.maximum(1.0, np.abs(trace[:-1]))
        assert np.all(np.diff(trace) >= -slack)


def test_clairvoyant_reduction():
    v = ncpd.steering_vector(0.0, 3)
    eye = np.eye(3, dtype=complex)
    empty = np.zeros(0, dtype=complex)
    alpha = 1.25 + 0.0j
    value = ncpd.cd_statistic(alpha * v, alpha, empty, eye, v)
    assert value == pytest.approx(abs(alpha) ** 2, rel=1e-12)


def test_experiment_determinism_across_workers():
    cfg = table1_config()
    cfg.pfa = 0.1
    cfg.scnr_grid_db = [0.0, 12.0]
    serial = ncpd.run_experiment(cfg, ["cd", "amf"], seed=21, workers=1,
                                 n_calibration=200, n_pd=150)
    threaded = ncpd.run_experiment(cfg, ["cd", "amf"], seed=21, workers=4,
                                   n_calibration=200, n_pd=150)
    for s, t in zip(serial.thresholds, threaded.thresholds):
        assert s.threshold == t.threshold
        assert s.empirical_pfa <= cfg.pfa
    for s, t in zip(serial.curves, threaded.curves):
        assert s.pd == t.pd
        assert all(0.0 <= p <= 1.0 for p in s.pd)


def test_config_round_trip_digest():
    cfg = ncpd.ScenarioConfig()
    cfg.k_secondary = 17
    text = ncpd.serialize_config(cfg)
    back = ncpd.parse_config_text(text)
    assert back == cfg
    assert ncpd.config_digest(back) == ncpd.config_digest(cfg)
    cfg.k_secondary = 18
    assert ncpd.config_digest(back) != ncpd.config_digest(cfg)
