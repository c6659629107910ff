"""
Ranking metrics for heavily imbalanced binary labels.

All rankings sort scores in descending order with ties kept in index order.
"""

from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, Field
from scipy.stats import rankdata

RECALL_LEVELS = (1, 5, 10, 50)

METRICS_COLUMNS = (
    ["model", "layers", "seed", "pr_auc", "roc_auc"]
    + [f"prec_at_{r}" for r in RECALL_LEVELS]
    + [f"lift_at_{r}" for r in RECALL_LEVELS]
)


class MetricError(ValueError):
    """Raised when a metric is undefined for its input (one class, no positives, ...)."""


def _inputs(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if s.shape != y.shape:
        raise MetricError(f"{s.shape[0]} scores for {y.shape[0]} labels")
    if not np.all(np.isin(y, (0, 1))):
        raise MetricError("labels must be 0/1")
    return s, y.astype(np.int64)


def ranking(scores: np.ndarray) -> np.ndarray:
    """Indices by descending score, stable among ties."""
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """P(score_pos > score_neg) + ½·P(tie), via average ranks (Mann-Whitney U)."""
    s, y = _inputs(scores, labels)
    n_pos = int(y.sum())
    n_neg = y.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("roc_auc needs both classes")
    ranks = rankdata(s)
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def pr_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Average precision: mean over positives of the precision at their rank."""
    s, y = _inputs(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise MetricError("pr_auc needs at least one positive")
    hits = y[ranking(s)]
    tp = np.cumsum(hits)
    precision = tp / np.arange(1, hits.shape[0] + 1)
    return float(precision[hits == 1].sum() / n_pos)


def precision_at_recall(scores: np.ndarray, labels: np.ndarray, recall_pct: float) -> tuple[float, float]:
    """
    (precision, lift) of the shortest top-ranked prefix whose recall reaches
    ``recall_pct`` percent; lift is precision over prevalence.
    """
    if not 0 < recall_pct <= 100:
        raise MetricError(f"recall level must be in (0, 100], got {recall_pct}")
    s, y = _inputs(scores, labels)
    n_pos = int(y.sum())
    if n_pos == 0:
        raise MetricError("precision_at_recall needs at least one positive")
    needed = max(1, math.ceil(recall_pct * n_pos / 100.0 - 1e-9))
    tp = np.cumsum(y[ranking(s)])
    prefix = int(np.searchsorted(tp, needed)) + 1
    precision = needed / prefix
    prevalence = n_pos / y.shape[0]
    return precision, precision / prevalence


class MetricsReport(BaseModel):
    model: str
    layers: int
    seed: int = 0
    roc_auc: float = Field(ge=0, le=1)
    pr_auc: float = Field(ge=0, le=1)
    precision_at: dict[int, float]
    lift_at: dict[int, float]

    def row(self) -> dict[str, object]:
        out: dict[str, object] = {
            "model": self.model, "layers": self.layers, "seed": self.seed,
            "pr_auc": self.pr_auc, "roc_auc": self.roc_auc,
        }
        out.update({f"prec_at_{r}": self.precision_at[r] for r in RECALL_LEVELS})
        out.update({f"lift_at_{r}": self.lift_at[r] for r in RECALL_LEVELS})
        return out


def evaluate_scores(scores: np.ndarray, labels: np.ndarray, model: str, layers: int,
                    seed: int = 0) -> MetricsReport:
    precision: dict[int, float] = {}
    lift: dict[int, float] = {}
    for r in RECALL_LEVELS:
        precision[r], lift[r] = precision_at_recall(scores, labels, r)
    return MetricsReport(
        model=model, layers=layers, seed=seed,
        roc_auc=roc_auc(scores, labels), pr_auc=pr_auc(scores, labels),
        precision_at=precision, lift_at=lift,
    )
