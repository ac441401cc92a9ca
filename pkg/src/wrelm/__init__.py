"""Weighted ring extreme learning machine.

A random-feature regressor trained once offline with sample weights, then
corrected at every step from a small ring buffer of recent (features, next
target) pairs without carrying any covariance state between steps.
"""

from .adapter import (
    AdaptedState,
    OnlineWeights,
    RingBuffer,
    StepResult,
    adapt,
    predict,
    push_pair,
    static_state,
    step,
)
from .dataset import DatasetFormatError, SeriesDataset, read_csv, write_csv
from .elm import (
    DegenerateColumnError,
    InputWeights,
    Scaler,
    apply_scaler,
    fit_scaler,
    hidden_matrix,
    hidden_row,
    init_input_weights,
    logistic_exact,
    logistic_pade,
)
from .evaluate import EvalReport, StreamResult, audit_causality, evaluate, replay
from .oracle import StackedSystem, batch_weighted_ls, stack
from .synthgen import GenConfig, bifurcation_scan, generate
from .trainer import (
    OfflineModel,
    TrainConfig,
    load_model,
    prune_transients,
    save_model,
    train_offline,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptedState",
    "DatasetFormatError",
    "DegenerateColumnError",
    "EvalReport",
    "GenConfig",
    "InputWeights",
    "OfflineModel",
    "OnlineWeights",
    "RingBuffer",
    "Scaler",
    "SeriesDataset",
    "StackedSystem",
    "StepResult",
    "StreamResult",
    "TrainConfig",
    "adapt",
    "apply_scaler",
    "audit_causality",
    "batch_weighted_ls",
    "bifurcation_scan",
    "evaluate",
    "fit_scaler",
    "generate",
    "hidden_matrix",
    "hidden_row",
    "init_input_weights",
    "load_model",
    "logistic_exact",
    "logistic_pade",
    "predict",
    "prune_transients",
    "push_pair",
    "read_csv",
    "replay",
    "save_model",
    "stack",
    "static_state",
    "step",
    "train_offline",
    "write_csv",
]
