"""
Model dispatch: bind parameters to a tape, run the right forward, build loss closures.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from src.autodiff.gradcheck import LossClosure
from src.autodiff.loss import bce_loss
from src.autodiff.tensor import Tape, Tensor
from src.graph.store import HeteroGraph

from .config import ModelConfig
from .entity import entity_forward
from .hetero import graph_forward
from .params import ModelParams


def bind(tape: Tape, params: ModelParams) -> dict[str, Tensor]:
    return {name: tape.param(name, value) for name, value in params.items()}


def forward(
    tape: Tape,
    params: dict[str, Tensor],
    config: ModelConfig,
    graph: Optional[HeteroGraph] = None,
    features: Optional[np.ndarray] = None,
) -> Tensor:
    """
    n_labeled × 1 scores. Graph models read the (prepared) graph; entity models read the
    (prepared) feature table and ignore adjacency.
    """
    if config.kind.is_graph_model:
        if graph is None:
            raise ValueError(f"{config.label} needs a graph")
        return graph_forward(tape, graph, params, config)
    if features is None:
        raise ValueError(f"{config.label} needs an entity feature table")
    return entity_forward(tape, features, params)


def predict(
    params: ModelParams,
    config: ModelConfig,
    graph: Optional[HeteroGraph] = None,
    features: Optional[np.ndarray] = None,
) -> np.ndarray:
    tape = Tape()
    scores = forward(tape, bind(tape, params), config, graph=graph, features=features)
    return scores.data[:, 0].copy()


def loss_closure(
    config: ModelConfig,
    labels: np.ndarray,
    rows: np.ndarray,
    graph: Optional[HeteroGraph] = None,
    features: Optional[np.ndarray] = None,
) -> LossClosure:
    """BCE over the labeled nodes in ``rows``; the closure records a fresh tape per call."""
    rows = np.asarray(rows, dtype=np.int64)
    targets = np.asarray(labels, dtype=np.float64)[rows].reshape(-1, 1)

    def closure(params: ModelParams) -> tuple[Tape, Tensor]:
        tape = Tape()
        scores = forward(tape, bind(tape, params), config, graph=graph, features=features)
        return tape, bce_loss(tape.select_rows(scores, rows), targets)

    return closure
