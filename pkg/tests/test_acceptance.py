"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The shared benchmark is a seeded panel of 20 series over 40 steps, each a
random nonnegative mixture of three shared sinusoids plus Gaussian noise at
5% of the clean signal's RMS amplitude, modeled with tau=3, ranks (20, 3),
(p, d, q) = (2, 1, 1), 10 iterations, tolerance 1e-5.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines.
"""

import functools
import time

import numpy as np

import bht_arima.cli as cli
from bht_arima.coeffs import estimate_ar
from bht_arima.diff import difference
from bht_arima.evaluate import naive_last_value, nrmse, rolling_backtest, synth_dataset
from bht_arima.mdt import inverse_mdt_temporal, mdt_temporal
from bht_arima.model import (
    ModelConfig,
    fit,
    forecast,
    update_core,
    update_error,
    update_factor_relaxed,
)
from bht_arima.tensor import multi_mode_product, unfold

BENCH_DATA_SEED = 7
BENCH_MODEL_SEED = 0
BENCH = synth_dataset("sinusoid-mixture", 20, 40, 0.05, seed=BENCH_DATA_SEED)


def bench_config(**overrides):
    base = dict(
        p=2, d=1, q=1, tau=3, ranks=(20, 3), max_iter=10, tol=1e-5,
        ortho="full", seed=BENCH_MODEL_SEED,
    )
    base.update(overrides)
    return ModelConfig(**base)


def criterion(number, label):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] criterion {number}: {label}")
                raise
            print(f"[PASS] criterion {number}: {label}")

        return wrapper

    return decorate


@criterion(1, "MDT roundtrip and Hankel structure, 200 random cases, < 5 s")
def test_criterion_1_mdt_roundtrip():
    rng = np.random.default_rng(100)
    began = time.perf_counter()
    for case in range(200):
        order = 2 if case % 2 == 0 else 3
        if order == 2:
            shape = (int(rng.integers(1, 7)), int(rng.integers(2, 31)))
        else:
            shape = (
                int(rng.integers(1, 5)),
                int(rng.integers(1, 5)),
                int(rng.integers(2, 25)),
            )
        x = rng.standard_normal(shape)
        tau = int(rng.integers(1, shape[-1] + 1))
        h = mdt_temporal(x, tau)
        assert np.max(np.abs(inverse_mdt_temporal(h, tau) - x)) < 1e-12
        if tau > 1:
            assert np.array_equal(h[..., 1:, :-1], h[..., :-1, 1:])
    assert time.perf_counter() - began < 5.0


@criterion(2, "factor orthogonality < 1e-8 after every iteration (full mode)")
def test_criterion_2_orthogonality():
    model = fit(BENCH, bench_config())
    assert model.ortho_trace.size > 0
    assert float(model.ortho_trace.max()) < 1e-8


@criterion(3, "relative factor change < 1e-3 within 10 iterations, final < first")
def test_criterion_3_convergence():
    model = fit(BENCH, bench_config())
    assert model.iterations_used <= 10
    assert model.trace[-1] < 1e-3
    assert model.trace[-1] < model.trace[0]


@criterion(4, "full-rank Tucker reconstruction < 1e-6 relative per slice")
def test_criterion_4_full_rank_lossless():
    model = fit(BENCH, bench_config())  # ranks (20, 3) == embedded shape
    dx = difference(mdt_temporal(BENCH, 3), 1).slices
    recon = multi_mode_product(model.cores, list(model.factors))
    checked = 0
    for j in range(dx.shape[-1]):
        norm = np.linalg.norm(dx[..., j])
        if norm > 1e-8:
            assert np.linalg.norm(recon[..., j] - dx[..., j]) / norm < 1e-6
            checked += 1
    assert checked > 0


@criterion(5, "degenerate case matches scalar AR(1) Yule-Walker forecast, < 1 s")
def test_criterion_5_scalar_oracle():
    rng = np.random.default_rng(55)
    n = 80
    series = np.zeros(n)
    for t in range(1, n):
        series[t] = 0.7 * series[t - 1] + rng.standard_normal()
    began = time.perf_counter()
    cfg = ModelConfig(
        p=1, d=0, q=0, tau=1, ranks=(1, 1), max_iter=10, tol=1e-5,
        ortho="full", seed=0,
    )
    got = forecast(fit(series[None, :], cfg), 1).forecasts[0, 0]
    elapsed = time.perf_counter() - began
    # independent scalar oracle: centered sample autocovariances with the
    # 1/(n-k) normalizer, alpha = gamma_1/gamma_0, prediction alpha * x_T
    centered = series - series.mean()
    gamma0 = np.dot(centered, centered) / n
    gamma1 = np.dot(centered[:-1], centered[1:]) / (n - 1)
    expected = (gamma1 / gamma0) * series[-1]
    assert abs(got - expected) / abs(expected) < 1e-6
    assert elapsed < 1.0


@criterion(6, "one-step rolling NRMSE < 0.8 x naive baseline, both modes, < 30 s")
def test_criterion_6_forecast_skill():
    began = time.perf_counter()
    t_len = BENCH.shape[-1]
    n_train = int(0.9 * t_len)
    naive_preds = np.stack(
        [naive_last_value(BENCH[..., :k], 1)[..., 0] for k in range(n_train, t_len)],
        axis=-1,
    )
    actuals = BENCH[..., n_train:]
    baseline = nrmse(naive_preds, actuals)
    for ortho in ("full", "relaxed"):
        report = rolling_backtest(
            BENCH, bench_config(ortho=ortho), train_fraction=0.9, horizon=1
        )
        assert report.nrmse < 0.8 * baseline, (
            f"{ortho}: {report.nrmse:.4f} vs 0.8 * {baseline:.4f}"
        )
    assert time.perf_counter() - began < 30.0


@criterion(7, "closed-form updates match brute-force scalar-loop oracles, 1e-10")
def test_criterion_7_update_oracles():
    rng = np.random.default_rng(77)
    shape = (3, 3, 3)

    # core update: half the projection plus AR terms minus MA terms
    projection = rng.standard_normal(shape)
    prev = [rng.standard_normal(shape) for _ in range(2)]
    errs = [rng.standard_normal(shape) for _ in range(2)]
    alpha = np.array([0.6, -0.25])
    beta = np.array([0.4, 0.15])
    got = update_core(projection, prev, errs, alpha, beta)
    expected = np.zeros(shape)
    for idx in np.ndindex(*shape):
        acc = projection[idx]
        for i in range(2):
            acc += alpha[i] * prev[i][idx]
            acc -= beta[i] * errs[i][idx]
        expected[idx] = 0.5 * acc
    assert np.max(np.abs(got - expected)) < 1e-10

    # error update: summed residuals over the usable range divided by
    # (s + 1 - t_hat) * beta_lag
    length = 9
    cores = rng.standard_normal((*shape, length))
    errors = [rng.standard_normal(shape) for _ in range(2)]
    lag = 0
    got_err, skipped = update_error(cores, alpha, beta, errors, lag)
    assert not skipped
    p, q, d = 2, 2, 1
    s = p + d + q
    t_hat = length + d
    start = p + q
    expected_err = np.zeros(shape)
    for idx in np.ndindex(*shape):
        total = 0.0
        for t in range(start, length):
            value = cores[idx][t]
            for i in range(1, p + 1):
                value -= alpha[i - 1] * cores[idx][t - i]
            for j in range(q):
                if j != lag:
                    value += beta[j] * errors[j][idx]
            total += value
        expected_err[idx] = total / ((s + 1 - t_hat) * beta[lag])
    assert np.max(np.abs(got_err - expected_err)) < 1e-10

    # relaxed last-mode update: normal equations built from the data mapped
    # through the pseudo-inverse of the explicit Kronecker chain
    n_t = 8
    xs = rng.standard_normal((*shape, n_t))
    factors = [
        np.linalg.qr(rng.standard_normal((3, 2)))[0] for _ in range(2)
    ] + [rng.standard_normal((3, 2))]
    cores_r = rng.standard_normal((2, 2, 2, n_t))
    got_factor, ridge = update_factor_relaxed(xs, cores_r, factors)
    assert not ridge
    # explicit chain U^(2).T kron U^(1).T (descending, skipping the last)
    chain = np.zeros((4, 9))
    u0t, u1t = factors[0].T, factors[1].T
    for i in range(2):
        for j in range(3):
            for k in range(2):
                for l in range(3):
                    chain[i * 2 + k, j * 3 + l] = u1t[i, j] * u0t[k, l]
    chain_pinv = np.linalg.pinv(chain)
    gram = np.zeros((3, 3))
    rhs = np.zeros((3, 2))
    for t in range(n_t):
        a_t = unfold(xs[..., t], 2) @ chain_pinv
        gram += a_t @ a_t.T
        rhs += a_t @ unfold(cores_r[..., t], 2).T
    expected_factor = np.linalg.solve(gram, rhs)
    assert np.max(np.abs(got_factor - expected_factor)) < 1e-10


@criterion(8, "Yule-Walker recovers AR(2) panel coefficients within 0.1")
def test_criterion_8_yule_walker_recovery():
    panel = synth_dataset("ar2-panel", 50, 200, 1.0, seed=13)
    alpha, fallback = estimate_ar(panel, 2)
    assert not fallback
    assert abs(alpha[0] - 0.5) < 0.1
    assert abs(alpha[1] - (-0.3)) < 0.1


@criterion(9, "identical run specification and seed give byte-identical reports")
def test_criterion_9_determinism(tmp_path):
    data_path = str(tmp_path / "bench.csv")
    with open(data_path, "w") as fh:
        fh.write(cli._csv_text(BENCH, digits=".17g"))
    args = [
        "backtest", data_path, "--ranks", "20,3", "--train-fraction", "0.9",
        "--seed", str(BENCH_MODEL_SEED),
    ]
    r1 = str(tmp_path / "r1.txt")
    r2 = str(tmp_path / "r2.txt")
    assert cli.main(args + ["--report-out", r1]) == 0
    assert cli.main(args + ["--report-out", r2]) == 0
    with open(r1, "rb") as f1, open(r2, "rb") as f2:
        assert f1.read() == f2.read()
    s1 = str(tmp_path / "s1.txt")
    s2 = str(tmp_path / "s2.txt")
    ff = ["fit-forecast", data_path, "--ranks", "20,3", "--horizon", "3",
          "--seed", str(BENCH_MODEL_SEED)]
    assert cli.main(ff + ["--forecast-out", str(tmp_path / "f1.csv"),
                          "--summary-out", s1]) == 0
    assert cli.main(ff + ["--forecast-out", str(tmp_path / "f2.csv"),
                          "--summary-out", s2]) == 0
    with open(s1, "rb") as f1, open(s2, "rb") as f2:
        assert f1.read() == f2.read()
    with open(tmp_path / "f1.csv", "rb") as f1, open(tmp_path / "f2.csv", "rb") as f2:
        assert f1.read() == f2.read()


@criterion(10, "multi-step NRMSE nondecreasing in horizon (5% slack), steps 1-10")
def test_criterion_10_long_horizon():
    report = rolling_backtest(
        BENCH, bench_config(), train_fraction=0.75, horizon=10
    )
    steps = report.per_step_nrmse
    assert steps.shape == (10,)
    for h in range(9):
        assert steps[h + 1] >= 0.95 * steps[h], (
            f"step {h + 2} dropped: {steps[h + 1]:.4f} < 0.95 * {steps[h]:.4f}"
        )
