"""Evaluation harness tests: metric, baselines, backtests, generators."""

import numpy as np
import pytest

import bht_arima.evaluate as evaluate
from bht_arima.errors import ConfigError
from bht_arima.evaluate import (
    EvalReport,
    naive_last_value,
    nrmse,
    parse_report,
    rolling_backtest,
    synth_dataset,
)
from bht_arima.model import ModelConfig


def test_nrmse_basics():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert nrmse(a, a) == 0.0
    assert nrmse(np.zeros_like(a), a) == 1.0
    assert np.isclose(nrmse(2.0 * a, a), 1.0)


def test_nrmse_scale_invariance():
    # exact equality needs a power-of-two scale (pure exponent shift)
    rng = np.random.default_rng(0)
    f = rng.standard_normal((3, 4))
    a = rng.standard_normal((3, 4))
    assert nrmse(f, a) == nrmse(-8.0 * f, -8.0 * a)
    assert np.isclose(nrmse(f, a), nrmse(-7.5 * f, -7.5 * a), rtol=1e-12)


def test_nrmse_errors():
    with pytest.raises(ValueError):
        nrmse(np.ones((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        nrmse(np.ones((2, 2)), np.ones((2, 3)))


def test_naive_last_value():
    x = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    got = naive_last_value(x, 3)
    assert got.shape == (2, 3)
    assert np.array_equal(got, np.array([[3.0] * 3, [6.0] * 3]))
    with pytest.raises(ValueError):
        naive_last_value(x, 0)


def test_naive_constant_series_zero_error():
    x = np.full((3, 10), 2.0)
    preds = naive_last_value(x[..., :8], 2)
    assert nrmse(preds, x[..., 8:]) == 0.0


def test_naive_linear_ramp_error_grows_linearly():
    t = np.arange(12.0)
    x = np.vstack([2.0 * t, -1.0 * t])
    preds = naive_last_value(x[:, :8], 4)
    abs_err = [np.linalg.norm(preds[:, h] - x[:, 8 + h]) for h in range(4)]
    ratios = np.array(abs_err) / abs_err[0]
    assert np.allclose(ratios, [1.0, 2.0, 3.0, 4.0], rtol=1e-10)


def test_synth_determinism_and_kinds():
    for kind in ("sinusoid-mixture", "ar2-panel", "random-walk"):
        a = synth_dataset(kind, 5, 30, 0.5, seed=42)
        b = synth_dataset(kind, 5, 30, 0.5, seed=42)
        assert np.array_equal(a, b)
        assert a.shape == (5, 30)
    with pytest.raises(ValueError):
        synth_dataset("fractal", 5, 30, 0.5, seed=0)
    with pytest.raises(ValueError):
        synth_dataset("random-walk", 5, 30, -1.0, seed=0)


def test_synth_sinusoid_rank_three():
    x = synth_dataset("sinusoid-mixture", 12, 60, 0.0, seed=5)
    s = np.linalg.svd(x, compute_uv=False)
    assert s[3] < 1e-8 * s[0]


def test_synth_ar2_recovery():
    from bht_arima.coeffs import estimate_ar

    panel = synth_dataset("ar2-panel", 50, 200, 1.0, seed=13)
    alpha, fallback = estimate_ar(panel, 2)
    assert not fallback
    assert np.all(np.abs(alpha - np.array([0.5, -0.3])) < 0.1)


def test_rolling_backtest_constant_series():
    x = np.full((4, 30), 5.0)
    cfg = ModelConfig(p=1, d=1, q=1, tau=3, max_iter=5, tol=1e-5, seed=0)
    report = rolling_backtest(x, cfg, train_fraction=0.8, horizon=1)
    assert report.nrmse < 1e-8
    assert np.all(report.per_step_nrmse < 1e-8)
    assert report.protocol == "rolling-one-step"


def test_rolling_backtest_validation():
    x = np.zeros((2, 20))
    cfg = ModelConfig()
    with pytest.raises(ConfigError):
        rolling_backtest(x, cfg, train_fraction=1.5)
    with pytest.raises(ConfigError):
        rolling_backtest(x, cfg, train_fraction=0.9, horizon=0)
    with pytest.raises(ConfigError):
        rolling_backtest(x, cfg, train_fraction=0.5, horizon=50)


def test_rolling_backtest_perfect_stub_scores_zero(monkeypatch):
    # a stub that memorizes the next true slice must yield exactly zero
    # NRMSE, pinning the forecast/actual alignment of the harness
    x = np.cumsum(np.random.default_rng(1).standard_normal((3, 25)), axis=1)

    class StubModel:
        def __init__(self, n_seen):
            self.n_seen = n_seen
            self.converged = True

    def stub_fit(prefix, cfg):
        return StubModel(prefix.shape[-1])

    def stub_forecast(model, horizon):
        class R:
            forecasts = x[..., model.n_seen : model.n_seen + horizon]
            converged = True
            iterations_used = 1

        return R()

    monkeypatch.setattr(evaluate, "fit", stub_fit)
    monkeypatch.setattr(evaluate, "forecast", stub_forecast)
    report = rolling_backtest(x, ModelConfig(), train_fraction=0.8, horizon=1)
    assert report.nrmse == 0.0


def test_rolling_backtest_multi_step():
    x = synth_dataset("sinusoid-mixture", 6, 40, 0.05, seed=3)
    cfg = ModelConfig(p=2, d=1, q=1, tau=3, ranks=(6, 3), max_iter=10, seed=0)
    report = rolling_backtest(x, cfg, train_fraction=0.75, horizon=5)
    assert report.protocol == "recursive-multi-step"
    assert report.per_step_nrmse.shape == (5,)
    assert report.n_train == 30 and report.n_test == 10


def test_rolling_backtest_no_refit_path():
    x = synth_dataset("sinusoid-mixture", 6, 40, 0.05, seed=3)
    cfg = ModelConfig(p=2, d=1, q=1, tau=3, ranks=(6, 3), max_iter=10, seed=0)
    r1 = rolling_backtest(x, cfg, train_fraction=0.9, horizon=1, refit=False)
    r2 = rolling_backtest(x, cfg, train_fraction=0.9, horizon=1, refit=False)
    assert r1.to_text() == r2.to_text()
    assert not r1.refit


def test_rolling_backtest_jobs_deterministic():
    x = synth_dataset("sinusoid-mixture", 6, 40, 0.05, seed=3)
    cfg = ModelConfig(p=2, d=1, q=1, tau=3, ranks=(6, 3), max_iter=10, seed=0)
    serial = rolling_backtest(x, cfg, train_fraction=0.9, horizon=1, jobs=1)
    parallel = rolling_backtest(x, cfg, train_fraction=0.9, horizon=1, jobs=3)
    assert serial.to_text() == parallel.to_text()


def test_report_roundtrip_carries_config():
    x = synth_dataset("sinusoid-mixture", 6, 40, 0.05, seed=3)
    cfg = ModelConfig(
        p=1, d=1, q=0, tau=2, ranks=(5, 2), max_iter=7, tol=1e-4,
        ortho="relaxed", seed=11,
    )
    report = rolling_backtest(x, cfg, train_fraction=0.8, horizon=1)
    parsed = parse_report(report.to_text())
    assert parsed["p"] == cfg.p and parsed["d"] == cfg.d and parsed["q"] == cfg.q
    assert parsed["tau"] == cfg.tau
    assert parsed["ranks"] == cfg.ranks
    assert parsed["max_iter"] == cfg.max_iter
    assert parsed["tol"] == cfg.tol
    assert parsed["ortho"] == cfg.ortho
    assert parsed["seed"] == cfg.seed
    assert parsed["train_fraction"] == 0.8
    assert parsed["nrmse"] == pytest.approx(report.nrmse, rel=1e-8)


def test_report_text_excludes_runtime():
    report = EvalReport(
        nrmse=0.5, per_step_nrmse=np.array([0.5]), runtime_seconds=123.0,
        config_echo=ModelConfig(), converged_fraction=1.0,
        protocol="rolling-one-step", train_fraction=0.9, horizon=1,
        n_train=9, n_test=1, refit=True,
    )
    assert "runtime" not in report.to_text()


def test_random_walk_persistence_equivalence():
    # with a lossless Tucker layer and AR(1) on raw values, the model tracks
    # the naive last-value forecast on a random walk
    x = synth_dataset("random-walk", 20, 500, 1.0, seed=3)
    cfg = ModelConfig(p=1, d=0, q=0, tau=1, ranks=(20, 1), max_iter=10, seed=0)
    report = rolling_backtest(x, cfg, train_fraction=0.96, horizon=1)
    n_train = report.n_train
    baseline = nrmse(x[..., n_train - 1 : -1], x[..., n_train:])
    assert report.nrmse <= 1.05 * baseline
