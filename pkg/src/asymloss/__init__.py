"""Binary decisions under covariate-driven asymmetric losses.

Maps a user-specified loss quartet to per-sample weights and thresholds,
trains weighted convexified empirical-risk minimizers (linear, lasso,
boosting, shallow/deep networks), and evaluates decisions by economic
cost, group error rates, and excess risk against brute-force oracles.
"""

__version__ = "0.1.0"

from .convexify import Convexifier
from .data import Dataset
from .losses import (
    ConstantQuartet,
    GroupQuartet,
    LossQuartet,
    TabularQuartet,
    attach_weights,
    symmetric_quartet,
    weigh_dataset,
)
from .metrics import MetricsReport, evaluate
from .models import decide, deserialize, predict_soft, serialize
from .simlab import SimConfig
from .train import FitResult, TrainConfig, fit_boosting, fit_lasso, fit_linear, fit_network

__all__ = [
    "Convexifier",
    "Dataset",
    "ConstantQuartet",
    "GroupQuartet",
    "LossQuartet",
    "TabularQuartet",
    "attach_weights",
    "symmetric_quartet",
    "weigh_dataset",
    "MetricsReport",
    "evaluate",
    "decide",
    "deserialize",
    "predict_soft",
    "serialize",
    "SimConfig",
    "FitResult",
    "TrainConfig",
    "fit_boosting",
    "fit_lasso",
    "fit_linear",
    "fit_network",
]
