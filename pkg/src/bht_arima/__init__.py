"""Forecasting for panels of (possibly short) time series.

The pipeline delay-embeds the temporal mode into a block Hankel tensor,
learns compressed core tensors through jointly optimized Tucker factors,
fits a tensor-form ARIMA on the core sequence, and maps predictions back
through the inverse transforms.
"""

from .coeffs import ArimaCoefficients, autocovariance, estimate_ar, estimate_ma
from .diff import DifferencedSeries, difference, invert_last, reconstruct
from .errors import (
    BhtArimaError,
    ConfigError,
    DataFormatError,
    NumericalError,
    SingularSystemError,
)
from .evaluate import EvalReport, naive_last_value, nrmse, rolling_backtest, synth_dataset
from .mdt import inverse_mdt_temporal, mdt_general, mdt_temporal
from .model import (
    FittedModel,
    ForecastResult,
    ModelConfig,
    append_observation,
    fit,
    forecast,
)
from .tensor import (
    fold,
    frobenius_norm,
    inner,
    kron_chain_skip,
    mode_product,
    multi_mode_product,
    unfold,
)

__version__ = "0.1.0"

__all__ = [
    "ArimaCoefficients",
    "BhtArimaError",
    "ConfigError",
    "DataFormatError",
    "DifferencedSeries",
    "EvalReport",
    "FittedModel",
    "ForecastResult",
    "ModelConfig",
    "NumericalError",
    "SingularSystemError",
    "append_observation",
    "autocovariance",
    "difference",
    "estimate_ar",
    "estimate_ma",
    "fit",
    "fold",
    "forecast",
    "frobenius_norm",
    "inner",
    "invert_last",
    "inverse_mdt_temporal",
    "kron_chain_skip",
    "mdt_general",
    "mdt_temporal",
    "mode_product",
    "multi_mode_product",
    "naive_last_value",
    "nrmse",
    "reconstruct",
    "rolling_backtest",
    "synth_dataset",
    "unfold",
]
