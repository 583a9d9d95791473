"""Block-Hankel-tensor ARIMA: joint Tucker + tensor ARIMA estimation.

``fit`` runs the full pipeline on an ``(I_1, ..., I_N, T)`` array: temporal
delay embedding, order-d differencing, then alternating closed-form updates
of compressed core tensors, orthonormal per-mode factor bases (with an
unconstrained last mode in relaxed mode), AR/MA coefficients, and shared
error tensors, until the relative factor change drops below tolerance.
``forecast`` propagates the core-space recursion and maps predictions back
through Tucker composition, inverse differencing, and inverse delay
embedding.

Everything is deterministic given the input, the configuration, and the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .coeffs import ArimaCoefficients, estimate_coefficients
from .diff import DifferencedSeries, difference, extend, push_observed, reconstruct
from .errors import ConfigError
from .mdt import inverse_mdt_temporal, mdt_temporal
from .tensor import mode_product, multi_mode_product

__all__ = [
    "ModelConfig",
    "FittedModel",
    "ForecastResult",
    "fit",
    "forecast",
    "append_observation",
    "update_core",
    "update_factor_full",
    "update_factor_relaxed",
    "update_error",
]

# Error-tensor updates divide by beta_i; magnitudes at or below this guard
# leave the previous value in place instead.
BETA_GUARD = 1e-8
# Condition-number ceiling above which the relaxed Gram solve takes the
# ridge path.
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class ModelConfig:
    """Hyperparameters for :func:`fit`.

    ``ranks`` has one entry per embedded mode (the N series modes plus the
    window mode of extent ``tau``); ``None`` picks ``ceil(0.8 * J_m)`` for
    the series modes and ``tau`` for the window mode. ``ortho`` is ``"full"``
    (every factor orthonormal) or ``"relaxed"`` (last mode unconstrained).
    """

    p: int = 2
    d: int = 1
    q: int = 1
    tau: int = 3
    ranks: tuple[int, ...] | None = None
    max_iter: int = 10
    tol: float = 1e-5
    ortho: str = "full"
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p", "d", "q"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.tau < 1:
            raise ConfigError(f"tau must be >= 1, got {self.tau}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.ortho not in ("full", "relaxed"):
            raise ConfigError(f"ortho must be 'full' or 'relaxed', got {self.ortho!r}")
        if self.ranks is not None:
            object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))

    @property
    def s(self) -> int:
        """Sum of the ARIMA orders; the minimum usable history length."""
        return self.p + self.d + self.q

    def resolved_ranks(self, embedded_shape: tuple[int, ...]) -> tuple[int, ...]:
        if self.ranks is None:
            series = [max(1, math.ceil(0.8 * j)) for j in embedded_shape[:-1]]
            return (*series, embedded_shape[-1])
        if len(self.ranks) != len(embedded_shape):
            raise ConfigError(
                f"need {len(embedded_shape)} ranks for embedded shape "
                f"{embedded_shape}, got {len(self.ranks)}"
            )
        for r, j in zip(self.ranks, embedded_shape):
            if not 1 <= r <= j:
                raise ConfigError(f"rank {r} outside [1, {j}] for extent {j}")
        return self.ranks

    def validate_for(self, data_shape: tuple[int, ...]) -> None:
        """Check the config against a concrete input shape before any work."""
        if len(data_shape) < 2:
            raise ConfigError(
                f"input must have shape (series dims..., time), got {data_shape}"
            )
        t_len = data_shape[-1]
        if self.tau > t_len:
            raise ConfigError(f"tau={self.tau} exceeds series length {t_len}")
        t_hat = t_len - self.tau + 1
        if t_hat - self.d <= self.s:
            raise ConfigError(
                f"embedded length {t_hat} minus d={self.d} must exceed "
                f"p+d+q={self.s}; series of length {t_len} is too short"
            )
        self.resolved_ranks((*data_shape[:-1], self.tau))


@dataclass(frozen=True)
class FittedModel:
    """Learned state: factors, differenced core sequence, error tensors,
    ARIMA coefficients, and the inverse-transform bookkeeping."""

    config: ModelConfig
    factors: tuple[np.ndarray, ...]
    cores: np.ndarray
    errors: tuple[np.ndarray, ...]
    coeffs: ArimaCoefficients
    diff_state: DifferencedSeries
    tau: int
    original_shape: tuple[int, ...]
    embedded_shape: tuple[int, ...]
    t_hat: int
    trace: np.ndarray
    ortho_trace: np.ndarray
    converged: bool
    iterations_used: int
    relaxed_ridge_used: bool = False
    error_updates_skipped: bool = False

    @property
    def ranks(self) -> tuple[int, ...]:
        return self.cores.shape[:-1]


@dataclass(frozen=True)
class ForecastResult:
    """Original-space forecasts (last axis = horizon step) plus the
    corresponding embedded-space slices and fit diagnostics."""

    forecasts: np.ndarray
    embedded_forecasts: np.ndarray
    converged: bool
    iterations_used: int


def update_core(
    projection: np.ndarray,
    prev_cores: list[np.ndarray] | tuple[np.ndarray, ...],
    errors: list[np.ndarray] | tuple[np.ndarray, ...],
    alpha: np.ndarray,
    beta: np.ndarray,
) -> np.ndarray:
    """Closed-form core update: half the sum of the Tucker projection and
    the ARIMA prediction from lagged cores and error tensors.

    ``prev_cores[i]`` and ``errors[i]`` are the lag-``i+1`` tensors.
    """
    acc = np.array(projection, dtype=np.float64)
    for i, a in enumerate(alpha):
        acc += a * prev_cores[i]
    for i, b in enumerate(beta):
        acc -= b * errors[i]
    return 0.5 * acc


def _stack_unfold(seq: np.ndarray, mode: int) -> np.ndarray:
    # Unfold every slice of a (*shape, n_t) stack along `mode` and
    # concatenate columns across t (column order is irrelevant to the sums
    # below as long as both operands use the same one).
    return np.reshape(np.moveaxis(seq, mode, 0), (seq.shape[mode], -1), order="F")


def _alignment_matrix(
    xs: np.ndarray,
    cores: np.ndarray,
    factors: list[np.ndarray] | tuple[np.ndarray, ...],
    mode: int,
) -> np.ndarray:
    """``sum_t X_t^(mode) U^(-mode).T G_t^(mode).T`` over the stacked range."""
    partial = multi_mode_product(xs, factors, transpose=True, skip=mode)
    return _stack_unfold(partial, mode) @ _stack_unfold(cores, mode).T


def update_factor_full(
    xs: np.ndarray,
    cores: np.ndarray,
    factors: list[np.ndarray] | tuple[np.ndarray, ...],
    mode: int,
) -> np.ndarray:
    """Procrustes update of the mode-``mode`` factor.

    ``xs`` and ``cores`` stack the differenced embedded slices and the
    current cores over the objective's time range (last axis). The factor is
    the orthonormal maximizer aligned with
    ``sum_t X_t^(mode) U^(-mode).T G_t^(mode).T``.
    """
    return linalg.procrustes(_alignment_matrix(xs, cores, factors, mode))


def _factor_basis(
    xs: np.ndarray,
    cores: np.ndarray,
    factors: list[np.ndarray] | tuple[np.ndarray, ...],
    mode: int,
    relaxed: bool = False,
) -> np.ndarray:
    """Orthonormal factor used inside the fit loop: the left singular basis
    of the alignment matrix.

    Spans the same alignment as :func:`update_factor_full` but pins the
    within-subspace rotation to the singular basis. The pure Procrustes map
    leaves that rotation free, and with full Tucker ranks the autoregressive
    terms then spin the factors by a constant angle every sweep, so the
    relative-factor-change stopping rule would never fire.
    """
    partial = _project_except(xs, list(factors), relaxed, mode)
    w = _stack_unfold(partial, mode) @ _stack_unfold(cores, mode).T
    return linalg.svd(w).u


def update_factor_relaxed(
    xs: np.ndarray,
    cores: np.ndarray,
    factors: list[np.ndarray] | tuple[np.ndarray, ...],
) -> tuple[np.ndarray, bool]:
    """Unconstrained least-squares update of the last-mode factor.

    Builds ``A_t = X_t^(last) @ pinv(U^(-last))`` through per-factor
    pseudo-inverses (the pseudo-inverse distributes over the Kronecker
    chain), then solves the normal equations
    ``(sum_t A_t A_t.T) U = sum_t A_t G_t^(last).T``. A singular Gram sum is
    ridge-regularized with ``1e-8 * trace / size`` and flagged.
    """
    last = len(factors) - 1
    if last < 1:
        raise ValueError("relaxed update needs at least two embedded modes")
    mats = [linalg.pinv(f.T).T for f in factors[:last]] + [factors[last]]
    a_stack = multi_mode_product(xs, mats, skip=last)
    am = _stack_unfold(a_stack, last)
    gm = _stack_unfold(cores, last)
    gram = am @ am.T
    rhs = am @ gm.T
    ridge_used = False
    try:
        if np.linalg.cond(gram) > _COND_LIMIT:
            raise np.linalg.LinAlgError
        factor = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        ridge_used = True
        lam = 1e-8 * np.trace(gram) / gram.shape[0]
        try:
            factor = np.linalg.solve(gram + lam * np.eye(gram.shape[0]), rhs)
        except np.linalg.LinAlgError:
            factor = linalg.lstsq(gram, rhs)
    return factor, ridge_used


def update_error(
    cores: np.ndarray,
    alpha: np.ndarray,
    beta: np.ndarray,
    errors: list[np.ndarray] | tuple[np.ndarray, ...],
    lag: int,
) -> tuple[np.ndarray, bool]:
    """Closed-form update of the shared lag-``lag+1`` error tensor.

    Sums the ARIMA residual plus the other error-lag contributions over the
    objective's time range and divides by ``(s + 1 - t_hat) * beta_lag``,
    exactly as the stationarity condition dictates (note the denominator is
    negative whenever the usable range has more than one step). Returns
    ``(tensor, skipped)``; the update is skipped when ``|beta_lag|`` is at or
    below ``BETA_GUARD`` or the denominator vanishes.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    p, q = alpha.size, beta.size
    if not 0 <= lag < q:
        raise ValueError(f"lag index {lag} out of range for q={q}")
    n = cores.shape[-1]
    denom_scale = p + q + 1 - n  # equals s + 1 - t_hat
    if abs(beta[lag]) <= BETA_GUARD or denom_scale == 0:
        return np.array(errors[lag]), True
    start = p + q
    resid = cores[..., start:].copy()
    for i in range(1, p + 1):
        resid -= alpha[i - 1] * cores[..., start - i : n - i]
    other = np.zeros(cores.shape[:-1])
    for k in range(q):
        if k != lag:
            other += beta[k] * errors[k]
    numerator = resid.sum(axis=-1) + (n - start) * other
    return numerator / (denom_scale * beta[lag]), False


def _projectors(
    factors: list[np.ndarray] | tuple[np.ndarray, ...], relaxed: bool
) -> list[np.ndarray]:
    """Per-mode projection matrices mapping slices to cores.

    Transposes for orthonormal factors; for the unconstrained last factor of
    relaxed mode the Moore-Penrose inverse, which is the least-squares
    projection and coincides with the transpose exactly when orthonormal.
    """
    mats = [f.T for f in factors]
    if relaxed:
        mats[-1] = linalg.pinv(factors[-1])
    return mats


def _project_all(
    dx: np.ndarray, factors: list[np.ndarray], relaxed: bool = False
) -> np.ndarray:
    out = dx
    for mode, mat in enumerate(_projectors(factors, relaxed)):
        out = mode_product(out, mat, mode)
    return out


def _project_except(
    dx: np.ndarray, factors: list[np.ndarray], relaxed: bool, skip: int
) -> np.ndarray:
    out = dx
    for mode, mat in enumerate(_projectors(factors, relaxed)):
        if mode != skip:
            out = mode_product(out, mat, mode)
    return out


def _orthogonality_defect(factors: list[np.ndarray], n_constrained: int) -> float:
    worst = 0.0
    for f in factors[:n_constrained]:
        gram = f.T @ f
        worst = max(worst, float(np.linalg.norm(gram - np.eye(f.shape[1]))))
    return worst


def fit(x: np.ndarray, cfg: ModelConfig) -> FittedModel:
    """Fit the model to an ``(I_1, ..., I_N, T)`` array (time last).

    Runs delay embedding with window ``cfg.tau``, order-``cfg.d``
    differencing, seeded random orthonormal factor initialization, then up to
    ``cfg.max_iter`` alternating update sweeps with a relative-factor-change
    stopping rule. The returned model stores the final projections of every
    differenced slice together with coefficients re-estimated from them, so
    its state is self-consistent under the converged factors.
    """
    x = np.asarray(x, dtype=np.float64)
    cfg.validate_for(x.shape)
    p, q = cfg.p, cfg.q

    embedded = mdt_temporal(x, cfg.tau)
    emb_shape = embedded.shape[:-1]
    t_hat = embedded.shape[-1]
    n_modes = len(emb_shape)
    ranks = cfg.resolved_ranks(emb_shape)

    ds = difference(embedded, cfg.d)
    dx = ds.slices
    n_diff = dx.shape[-1]
    start = p + q

    rng = np.random.default_rng(cfg.seed)
    factors = [np.linalg.qr(rng.standard_normal((j, r)))[0] for j, r in zip(emb_shape, ranks)]
    errors = [1e-2 * rng.standard_normal(ranks) for _ in range(q)]

    relaxed = cfg.ortho == "relaxed"
    n_constrained = n_modes - 1 if relaxed else n_modes
    trace: list[float] = []
    ortho_trace: list[float] = []
    converged = False
    ridge_used = False
    err_skipped = False

    for _ in range(cfg.max_iter):
        cores = _project_all(dx, factors, relaxed)
        est = estimate_coefficients(cores, p, q)
        previous = [f.copy() for f in factors]
        for mode in range(n_modes):
            projection = _project_all(dx, factors, relaxed)
            new_cores = projection.copy()
            for j in range(start, n_diff):
                prev_cores = [cores[..., j - i] for i in range(1, p + 1)]
                new_cores[..., j] = update_core(
                    projection[..., j], prev_cores, errors, est.alpha, est.beta
                )
            cores = new_cores
            if relaxed and mode == n_modes - 1:
                factors[mode], used_ridge = update_factor_relaxed(
                    dx[..., start:], cores[..., start:], factors
                )
                ridge_used = ridge_used or used_ridge
            else:
                factors[mode] = _factor_basis(
                    dx[..., start:], cores[..., start:], factors, mode, relaxed
                )
        for i in range(q):
            errors[i], skipped = update_error(cores, est.alpha, est.beta, errors, i)
            err_skipped = err_skipped or skipped
        delta = sum(
            float(np.sum((f - pf) ** 2)) for f, pf in zip(factors, previous)
        ) / sum(float(np.sum(f**2)) for f in factors)
        trace.append(delta)
        ortho_trace.append(_orthogonality_defect(factors, n_constrained))
        if delta < cfg.tol:
            converged = True
            break

    # Store the state a further sweep would start from: fresh projections
    # under the final factors, with coefficients estimated from them.
    cores = _project_all(dx, factors, relaxed)
    est = estimate_coefficients(cores, p, q)

    return FittedModel(
        config=cfg,
        factors=tuple(f.copy() for f in factors),
        cores=cores,
        errors=tuple(e.copy() for e in errors),
        coeffs=est,
        diff_state=ds,
        tau=cfg.tau,
        original_shape=x.shape,
        embedded_shape=emb_shape,
        t_hat=t_hat,
        trace=np.array(trace),
        ortho_trace=np.array(ortho_trace),
        converged=converged,
        iterations_used=len(trace),
        relaxed_ridge_used=ridge_used,
        error_updates_skipped=err_skipped,
    )


def _core_prediction(
    cores: np.ndarray, errors: list[np.ndarray], coeffs: ArimaCoefficients
) -> np.ndarray:
    """One-step core-space prediction from the most recent cores/errors."""
    pred = np.zeros(cores.shape[:-1])
    for i, a in enumerate(coeffs.alpha, start=1):
        pred += a * cores[..., -i]
    for i, b in enumerate(coeffs.beta):
        pred -= b * errors[i]
    return pred


def forecast(model: FittedModel, horizon: int) -> ForecastResult:
    """Recursive multi-step forecast in the original space.

    Each step predicts the next differenced core, composes it back to an
    embedded slice, integrates the differencing, and appends the slice; the
    original-space value is read off the inverse delay embedding of the
    extended sequence. Later steps reuse predicted slices (projected back to
    cores) with zero future innovations; the model is never refitted.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    factors = list(model.factors)
    relaxed = model.config.ortho == "relaxed"
    cores = model.cores
    errors = [np.array(e) for e in model.errors]
    ds = model.diff_state
    emb_seq = reconstruct(ds)
    out_orig = []
    out_emb = []
    for _ in range(horizon):
        d_core = _core_prediction(cores, errors, model.coeffs)
        d_slice = multi_mode_product(d_core, factors)
        ds, emb_slice = extend(ds, d_slice)
        emb_seq = np.concatenate([emb_seq, emb_slice[..., None]], axis=-1)
        series = inverse_mdt_temporal(emb_seq, model.tau)
        out_orig.append(series[..., -1])
        out_emb.append(emb_slice)
        cores = np.concatenate(
            [cores, _project_all(d_slice, factors, relaxed)[..., None]], axis=-1
        )
        if errors:
            errors = [np.zeros(model.ranks)] + errors[:-1]
    return ForecastResult(
        forecasts=np.stack(out_orig, axis=-1),
        embedded_forecasts=np.stack(out_emb, axis=-1),
        converged=model.converged,
        iterations_used=model.iterations_used,
    )


def append_observation(model: FittedModel, new_slice: np.ndarray) -> FittedModel:
    """Absorb one observed original-space slice without refitting.

    Factors and coefficients stay fixed; the embedded sequence, differencing
    state, core sequence, and error lags advance by one step (the realized
    innovation replaces the lag-1 error tensor).
    """
    new_slice = np.asarray(new_slice, dtype=np.float64)
    if new_slice.shape != model.original_shape[:-1]:
        raise ValueError(
            f"slice shape {new_slice.shape} != {model.original_shape[:-1]}"
        )
    emb_seq = reconstruct(model.diff_state)
    series = inverse_mdt_temporal(emb_seq, model.tau)
    extended = np.concatenate([series, new_slice[..., None]], axis=-1)
    emb_new = mdt_temporal(extended[..., -model.tau :], model.tau)[..., 0]
    ds2, d_new = push_observed(model.diff_state, emb_new)
    g_new = _project_all(
        d_new, list(model.factors), model.config.ortho == "relaxed"
    )
    errors = [np.array(e) for e in model.errors]
    if errors:
        predicted = _core_prediction(model.cores, errors, model.coeffs)
        errors = [g_new - predicted] + errors[:-1]
    return replace(
        model,
        cores=np.concatenate([model.cores, g_new[..., None]], axis=-1),
        errors=tuple(errors),
        diff_state=ds2,
        original_shape=(*model.original_shape[:-1], model.original_shape[-1] + 1),
        t_hat=model.t_hat + 1,
    )
