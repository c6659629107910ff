"""
Result files and console tables.

``metrics.csv`` and ``cv_table.csv`` are upserted: rows for the same variant are replaced,
and the file is rewritten in a fixed sort order so reruns produce identical bytes.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import pandas as pd
from rich.table import Table

from src.graph.container import atomic_write_csv
from src.graph.schema import HeteroSchema
from src.models.config import MODEL_LABELS, ModelConfig
from src.models.params import count_parameters
from src.netfeatures.summary import extra_degree_columns

from .metrics import METRICS_COLUMNS, RECALL_LEVELS, MetricsReport
from .tuning import CV_COLUMNS, CVRow

logger = logging.getLogger(__name__)

# (group title, model label); the mlp group falls back to logreg rows at one layer
TABLE_GROUPS: list[tuple[str, str]] = [
    ("Regular Neural Network", "mlp"),
    ("HGraphSage", "hgraphsage"),
    ("HGraphSage (extra features)", "hgraphsage-deg"),
    ("HMPNN-sum", "hmpnn-sum"),
    ("HMPNN-ct", "hmpnn-ct"),
]
LAYERS = (1, 2, 3)


def _model_rank(label: str) -> int:
    return MODEL_LABELS.index(label) if label in MODEL_LABELS else len(MODEL_LABELS)


def _sorted(frame: pd.DataFrame, keys: list[str]) -> pd.DataFrame:
    frame = frame.assign(_rank=frame["model"].map(_model_rank))
    return frame.sort_values(["_rank", *keys], kind="stable").drop(columns="_rank").reset_index(drop=True)


def _read(path: Path, columns: list[str]) -> pd.DataFrame:
    if path.exists():
        return pd.read_csv(path)[columns]
    return pd.DataFrame(columns=columns)


def upsert_metrics(path: Path, reports: Iterable[MetricsReport]) -> pd.DataFrame:
    new = pd.DataFrame([r.row() for r in reports], columns=METRICS_COLUMNS)
    old = _read(path, METRICS_COLUMNS)
    if not old.empty and not new.empty:
        keys = set(zip(new["model"], new["layers"], new["seed"]))
        keep = [k not in keys for k in zip(old["model"], old["layers"], old["seed"])]
        old = old[keep]
    frames = [f for f in (old, new) if not f.empty]
    frame = pd.concat(frames, ignore_index=True) if frames else new
    frame = _sorted(frame, ["layers", "seed"])
    atomic_write_csv(path, frame)
    logger.info("Wrote %d metric rows to %s", len(frame), path)
    return frame


def upsert_cv_table(path: Path, rows: Iterable[CVRow]) -> pd.DataFrame:
    new = pd.DataFrame([r.model_dump() for r in rows], columns=CV_COLUMNS)
    old = _read(path, CV_COLUMNS)
    if not old.empty and not new.empty:
        keys = set(zip(new["model"], new["layers"]))
        keep = [k not in keys for k in zip(old["model"], old["layers"])]
        old = old[keep]
    frames = [f for f in (old, new) if not f.empty]
    frame = pd.concat(frames, ignore_index=True) if frames else new
    frame = _sorted(frame, ["layers", "lr", "l2", "fold"])
    atomic_write_csv(path, frame)
    return frame


def load_metrics(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise FileNotFoundError(f"Metrics file not found: {path}")
    return pd.read_csv(path)


def _group_rows(metrics: pd.DataFrame, label: str, layers: int) -> pd.DataFrame:
    rows = metrics[(metrics["model"] == label) & (metrics["layers"] == layers)]
    if rows.empty and label == "mlp" and layers == 1:
        rows = metrics[(metrics["model"] == "logreg") & (metrics["layers"] == 1)]
    return rows


def performance_table(metrics: pd.DataFrame) -> Table:
    """Model groups × layer counts, metrics averaged over seeds."""
    table = Table(title="Test-set performance", show_lines=False)
    table.add_column("Model", style="bold")
    table.add_column("Layers", justify="right")
    table.add_column("PR AUC", justify="right")
    table.add_column("ROC AUC", justify="right")
    for r in RECALL_LEVELS:
        table.add_column(f"P@R{r}%", justify="right")

    for title, label in TABLE_GROUPS:
        for k in LAYERS:
            rows = _group_rows(metrics, label, k)
            if rows.empty:
                cells = ["-"] * (2 + len(RECALL_LEVELS))
            else:
                cols = ["pr_auc", "roc_auc"] + [f"prec_at_{r}" for r in RECALL_LEVELS]
                cells = [f"{100 * rows[c].mean():.2f}" for c in cols]
            table.add_row(title if k == 1 else "", str(k), *cells)
        table.add_section()
    return table


def parameter_table(schema: Optional[HeteroSchema], num_features: int, hidden_dim: int = 8) -> Table:
    """Trainable parameter counts for every model group and layer count."""
    table = Table(title="Number of model parameters")
    table.add_column("Model", style="bold")
    for k in LAYERS:
        table.add_column(f"{k} layer{'s' if k > 1 else ''}", justify="right")
    for title, label in TABLE_GROUPS:
        counts = []
        for k in LAYERS:
            config = ModelConfig.from_label(label, k, hidden_dim=hidden_dim)
            graph_schema = schema
            if config.use_extra_degree_features and schema is not None:
                graph_schema = _with_extra_degree_dims(schema)
            counts.append(str(count_parameters(graph_schema, config, num_features)))
        table.add_row(title, *counts)
    return table


def _with_extra_degree_dims(schema: HeteroSchema) -> HeteroSchema:
    return schema.with_node_dims({
        t: schema.node_dim(t) + len(extra_degree_columns(schema, t)) for t in schema.node_type_names
    })


def metrics_summary(metrics: pd.DataFrame) -> pd.DataFrame:
    """Seed-averaged metrics per (model, layers)."""
    numeric = [c for c in METRICS_COLUMNS if c not in ("model", "layers", "seed")]
    out = metrics.groupby(["model", "layers"], sort=False)[numeric].mean().reset_index()
    return _sorted(out, ["layers"]).astype({c: np.float64 for c in numeric})
