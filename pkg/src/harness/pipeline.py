"""Experiment wiring shared by the CLI and the demo script."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from src.autodiff.checkpoint import load_checkpoint, save_checkpoint
from src.autodiff.gradcheck import GradCheckReport, finite_diff_check
from src.graph.container import load_graph, load_labels
from src.graph.schema import schema_hash
from src.graph.store import GraphError, HeteroGraph, LabelTable
from src.models.config import ModelConfig
from src.models.forward import loss_closure, predict
from src.models.inputs import ModelInputs, prepare_inputs
from src.models.params import ModelParams, init_params
from src.netfeatures.assemble import align_to, load_feature_table

from .metrics import MetricsReport, evaluate_scores
from .split import SplitSpec, stratified_split
from .tuning import BestHypers, GridResult, HyperGrid, grid_search

logger = logging.getLogger(__name__)


@dataclass
class Experiment:
    graph: HeteroGraph
    labels: LabelTable
    split: SplitSpec
    features: Optional[np.ndarray] = None
    _inputs: dict[tuple[bool, bool], ModelInputs] = field(default_factory=dict, repr=False)

    @property
    def y(self) -> np.ndarray:
        return self.labels.labels

    def inputs_for(self, config: ModelConfig) -> ModelInputs:
        key = (config.kind.is_graph_model, config.use_extra_degree_features)
        if key not in self._inputs:
            if not config.kind.is_graph_model and self.features is None:
                raise FileNotFoundError(f"{config.label} needs features_individual.csv; run `features` first")
            self._inputs[key] = prepare_inputs(config, graph=self.graph, features=self.features)
        return self._inputs[key]


def load_experiment(
    graph_dir: Path,
    features_file: Optional[Path] = None,
    ratio: float = 0.7,
    seed: int = 0,
) -> Experiment:
    if not graph_dir.is_dir():
        raise FileNotFoundError(f"Graph directory not found: {graph_dir}")
    graph = load_graph(graph_dir)
    labels = load_labels(graph_dir, graph)
    features = None
    if features_file is not None and features_file.exists():
        features = align_to(load_feature_table(features_file), graph.node_ids[labels.labeled_type])
    split = stratified_split(labels.labels, ratio=ratio, seed=seed)
    logger.info("Loaded %s: %d labeled nodes, %d positive; split %d/%d",
                graph_dir, labels.labels.shape[0], labels.num_positive,
                split.train.shape[0], split.test.shape[0])
    return Experiment(graph=graph, labels=labels, split=split, features=features)


def tune_variant(config: ModelConfig, experiment: Experiment, grid: HyperGrid, seed: int = 0,
                 jobs: int = 1) -> GridResult:
    return grid_search(config, experiment.inputs_for(config), experiment.y, experiment.split.train,
                       grid, seed=seed, jobs=jobs)


def evaluate_variant(config: ModelConfig, params: ModelParams, experiment: Experiment,
                     seed: int = 0) -> MetricsReport:
    inputs = experiment.inputs_for(config)
    scores = predict(params, config, graph=inputs.graph, features=inputs.features)
    test = experiment.split.test
    return evaluate_scores(scores[test], experiment.y[test], config.label, config.num_layers, seed)


# ── Checkpoints ───────────────────────────────────────────────────────────────

def variant_key(config: ModelConfig) -> str:
    return f"{config.label}_K{config.num_layers}"


def checkpoint_path(out_dir: Path, config: ModelConfig) -> Path:
    return out_dir / "checkpoints" / f"{variant_key(config)}.json"


def save_model(path: Path, params: ModelParams, config: ModelConfig, experiment: Experiment,
               hypers: Optional[BestHypers] = None) -> Path:
    meta: dict[str, Any] = {
        "model": config.label,
        "kind": config.kind.value,
        "layers": config.num_layers,
        "hidden_dim": config.hidden_dim,
        "use_extra_degree_features": config.use_extra_degree_features,
        "seed": config.seed,
        "schema_hash": schema_hash(experiment.graph.schema),
    }
    if hypers is not None:
        meta.update(lr=hypers.lr, l2=hypers.l2, iterations=hypers.iterations)
    return save_checkpoint(path, params, meta)


def load_model(path: Path, experiment: Experiment) -> tuple[ModelParams, ModelConfig]:
    params, meta = load_checkpoint(path)
    expected = schema_hash(experiment.graph.schema)
    if meta.get("schema_hash") != expected:
        raise GraphError(f"{path.name}: checkpoint schema {meta.get('schema_hash')} != graph schema {expected}")
    config = ModelConfig.from_label(
        meta["model"], int(meta["layers"]),
        hidden_dim=int(meta.get("hidden_dim", 8)), seed=int(meta.get("seed", 0)),
    )
    return params, config


# ── Gradient check ────────────────────────────────────────────────────────────

def check_gradients(
    config: ModelConfig,
    experiment: Experiment,
    h: float = 1e-6,
    tolerance: float = 1e-4,
    max_entries: Optional[int] = None,
) -> GradCheckReport:
    """Finite-difference check of the training loss over every labeled node at initialization."""
    inputs = experiment.inputs_for(config)
    params = init_params(inputs.schema, config, inputs.num_features)
    rows = np.arange(experiment.y.shape[0])
    closure = loss_closure(config, experiment.y, rows, graph=inputs.graph, features=inputs.features)
    return finite_diff_check(closure, params, h=h, tolerance=tolerance, max_entries=max_entries,
                             seed=config.seed)
