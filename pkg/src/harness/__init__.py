"""Splits, training, cross-validated tuning and evaluation."""

from .metrics import (
    METRICS_COLUMNS,
    MetricError,
    MetricsReport,
    evaluate_scores,
    pr_auc,
    precision_at_recall,
    roc_auc,
)
from .split import SplitSpec, kfold_stratified, stratified_split
from .train import TrainConfig, TrainLog, TrainResult, train
from .tuning import CV_COLUMNS, BestHypers, CVRow, GridResult, HyperGrid, grid_search

__all__ = [
    "BestHypers", "CVRow", "CV_COLUMNS", "GridResult", "HyperGrid", "METRICS_COLUMNS",
    "MetricError", "MetricsReport", "SplitSpec", "TrainConfig", "TrainLog", "TrainResult",
    "evaluate_scores", "grid_search", "kfold_stratified", "pr_auc", "precision_at_recall",
    "roc_auc", "stratified_split", "train",
]
