"""
Cross-validated grid search over learning rate and L2 strength.

Every (lr, λ) point trains once per fold with early stopping and is scored by its mean
validation PR AUC. The winner is the highest mean; ties go to the smaller λ, then the
smaller lr. It is retrained on the whole training set for the median of its folds'
best iterations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, field_validator

from src.models.config import ModelConfig
from src.models.inputs import ModelInputs

from .split import kfold_stratified
from .train import TrainConfig, TrainResult, train

logger = logging.getLogger(__name__)

CV_COLUMNS = ["model", "layers", "lr", "l2", "fold", "val_pr_auc", "stop_iter"]


class HyperGrid(BaseModel):
    learning_rates: list[float] = Field(default_factory=lambda: [1e-4, 1e-3, 1e-2, 1e-1])
    l2_strengths: list[float] = Field(default_factory=lambda: [10.0 ** e for e in range(-8, 0)])
    max_iter: int = Field(default=2000, ge=0)
    eval_every: int = Field(default=10, ge=1)
    patience: int = Field(default=10, ge=1)
    folds: int = Field(default=5, ge=2)

    @field_validator("learning_rates")
    @classmethod
    def _lr_range(cls, v: list[float]) -> list[float]:
        if not v:
            raise ValueError("at least one learning rate is required")
        for lr in v:
            if not 0 <= lr <= 1e-1:
                raise ValueError(f"learning rate {lr} outside [0, 1e-1]")
        return v

    @field_validator("l2_strengths")
    @classmethod
    def _l2_range(cls, v: list[float]) -> list[float]:
        if not v:
            raise ValueError("at least one L2 strength is required")
        for l2 in v:
            if not 0 <= l2 <= 1e-1:
                raise ValueError(f"L2 strength {l2} outside [0, 1e-1]")
        return v

    def points(self) -> list[tuple[float, float]]:
        return [(lr, l2) for lr in self.learning_rates for l2 in self.l2_strengths]

    def train_config(self, lr: float, l2: float, max_iter: int | None = None) -> TrainConfig:
        return TrainConfig(lr=lr, l2=l2, max_iter=self.max_iter if max_iter is None else max_iter,
                           eval_every=self.eval_every, patience=self.patience)


class CVRow(BaseModel):
    model: str
    layers: int
    lr: float
    l2: float
    fold: int
    val_pr_auc: float
    stop_iter: int


class BestHypers(BaseModel):
    model: str
    layers: int
    lr: float
    l2: float
    iterations: int
    mean_val_pr_auc: float
    seed: int


@dataclass
class GridResult:
    best: BestHypers
    cv_rows: list[CVRow]
    final: TrainResult


def _fold_run(config: ModelConfig, inputs: ModelInputs, labels: np.ndarray,
              train_rows: np.ndarray, val_rows: np.ndarray, hypers: TrainConfig) -> tuple[float, int]:
    result = train(config, inputs, labels, train_rows, hypers, val_rows=val_rows)
    return float(result.log.best_val_pr_auc or 0.0), result.log.best_iteration


def grid_search(
    config: ModelConfig,
    inputs: ModelInputs,
    labels: np.ndarray,
    train_rows: np.ndarray,
    grid: HyperGrid,
    seed: int = 0,
    jobs: int = 1,
) -> GridResult:
    labels = np.asarray(labels)
    train_rows = np.asarray(train_rows, dtype=np.int64)
    folds = kfold_stratified(labels[train_rows], k=grid.folds, seed=seed)
    points = grid.points()
    tasks = [(lr, l2, f, fold) for lr, l2 in points for f, fold in enumerate(folds)]

    outcomes = Parallel(n_jobs=jobs)(
        delayed(_fold_run)(config, inputs, labels, train_rows[fold.train], train_rows[fold.test],
                           grid.train_config(lr, l2))
        for lr, l2, _, fold in tasks
    )

    rows = [
        CVRow(model=config.label, layers=config.num_layers, lr=lr, l2=l2, fold=f,
              val_pr_auc=value, stop_iter=stop)
        for (lr, l2, f, _), (value, stop) in zip(tasks, outcomes)
    ]

    summary = []
    for lr, l2 in points:
        mine = [r for r in rows if r.lr == lr and r.l2 == l2]
        mean = float(np.mean([r.val_pr_auc for r in mine]))
        stop = int(np.median([r.stop_iter for r in mine]))
        summary.append((mean, l2, lr, stop))
    mean, l2, lr, stop = min(summary, key=lambda s: (-s[0], s[1], s[2]))
    logger.info("%s K=%d: best lr=%g l2=%g mean val PR AUC %.4f, retraining for %d iterations",
                config.label, config.num_layers, lr, l2, mean, stop)

    final = train(config, inputs, labels, train_rows, grid.train_config(lr, l2, max_iter=stop))
    best = BestHypers(model=config.label, layers=config.num_layers, lr=lr, l2=l2,
                      iterations=stop, mean_val_pr_auc=mean, seed=seed)
    return GridResult(best=best, cv_rows=rows, final=final)
