"""
Full-batch training with Adam and early stopping on validation PR AUC.

PR AUC on the validation rows is measured before the first step and every
``eval_every`` steps after it. Training stops after ``patience`` evaluations without
improvement, and the parameters from the best evaluation are returned. Without
validation rows the loop runs exactly ``max_iter`` steps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from src.autodiff.optim import AdamState, adam_step
from src.autodiff.tensor import NumericError
from src.models.config import ModelConfig
from src.models.forward import loss_closure, predict
from src.models.inputs import ModelInputs
from src.models.params import ModelParams, init_params

from .metrics import pr_auc

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    lr: float = Field(default=1e-2, ge=0)
    l2: float = Field(default=0.0, ge=0)
    max_iter: int = Field(default=2000, ge=0)
    eval_every: int = Field(default=10, ge=1)
    patience: int = Field(default=10, ge=1)


class EvalPoint(BaseModel):
    iteration: int
    train_loss: float
    val_pr_auc: Optional[float] = None


class TrainLog(BaseModel):
    model: str
    layers: int
    lr: float
    l2: float
    evaluations: list[EvalPoint] = Field(default_factory=list)
    best_iteration: int = 0
    best_val_pr_auc: Optional[float] = None
    iterations_run: int = 0
    early_stopped: bool = False


@dataclass
class TrainResult:
    params: ModelParams
    log: TrainLog


def _loss(closure, params: ModelParams) -> tuple[float, dict[str, np.ndarray]]:
    tape, loss = closure(params)
    return loss.item(), tape.backward(loss)


def train(
    config: ModelConfig,
    inputs: ModelInputs,
    labels: np.ndarray,
    train_rows: np.ndarray,
    hypers: TrainConfig,
    val_rows: Optional[np.ndarray] = None,
    params: Optional[ModelParams] = None,
) -> TrainResult:
    """Train on ``train_rows`` only; parameters are initialized from ``config.seed``."""
    labels = np.asarray(labels)
    if params is None:
        params = init_params(inputs.schema, config, inputs.num_features)
    closure = loss_closure(config, labels, train_rows, graph=inputs.graph, features=inputs.features)
    state = AdamState(lr=hypers.lr, weight_decay=hypers.l2)
    log = TrainLog(model=config.label, layers=config.num_layers, lr=hypers.lr, l2=hypers.l2)

    def validate(iteration: int, loss_value: float) -> Optional[float]:
        value = None
        if val_rows is not None:
            scores = predict(params, config, graph=inputs.graph, features=inputs.features)
            value = pr_auc(scores[val_rows], labels[val_rows])
        log.evaluations.append(EvalPoint(iteration=iteration, train_loss=loss_value, val_pr_auc=value))
        logger.debug("%s K=%d it=%d loss=%.6f val_pr_auc=%s", config.label, config.num_layers,
                     iteration, loss_value, "-" if value is None else f"{value:.4f}")
        return value

    best_params = params
    loss_value, grads = _run_step(closure, params, config, 0, hypers)
    log.best_val_pr_auc = validate(0, loss_value)
    stale = 0

    for it in range(1, hypers.max_iter + 1):
        params = adam_step(state, params, grads)
        log.iterations_run = it
        loss_value, grads = _run_step(closure, params, config, it, hypers)
        if val_rows is None or it % hypers.eval_every:
            continue
        value = validate(it, loss_value)
        if value is not None and (log.best_val_pr_auc is None or value > log.best_val_pr_auc):
            log.best_val_pr_auc = value
            log.best_iteration = it
            best_params = params
            stale = 0
        else:
            stale += 1
            if stale >= hypers.patience:
                log.early_stopped = True
                logger.info("%s K=%d early stop at %d (best %d, val PR AUC %.4f)",
                            config.label, config.num_layers, it, log.best_iteration,
                            log.best_val_pr_auc or 0.0)
                break

    if val_rows is None:
        best_params = params
        log.best_iteration = log.iterations_run
        validate(log.iterations_run, loss_value)
    return TrainResult(params=best_params, log=log)


def _run_step(closure, params: ModelParams, config: ModelConfig, it: int,
              hypers: TrainConfig) -> tuple[float, dict[str, np.ndarray]]:
    try:
        loss_value, grads = _loss(closure, params)
    except NumericError as exc:
        raise NumericError(
            f"{config.label} K={config.num_layers} diverged at iteration {it} "
            f"(lr={hypers.lr:g}, l2={hypers.l2:g}): {exc}"
        ) from exc
    if not np.isfinite(loss_value):
        raise NumericError(f"{config.label} K={config.num_layers}: non-finite loss at iteration {it}")
    return loss_value, grads
