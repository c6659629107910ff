"""
Graph container on disk.

Layout of a container directory:
  schema.json                       node_types, edge_types, allowed_meta_steps, feature names
  nodes_<type>.csv                  header ``id,<feature names>``; id unique within type
  edges_<src>__<etype>__<dst>.csv   header ``src_id,dst_id,<feature names>``
  labels_<type>.csv                 header ``id,label``

Global ids exist only in the files; they are mapped to dense per-type indices at load.
All writes go to a temporary file first and are renamed into place.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from .schema import HeteroSchema
from .store import EdgeTable, GraphError, HeteroGraph, LabelTable, build_graph

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


# ── Atomic writers ────────────────────────────────────────────────────────────

def atomic_write_text(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory and rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def atomic_write_csv(path: Path, frame: pd.DataFrame) -> None:
    atomic_write_text(path, frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))


def atomic_write_json(path: Path, data: Any) -> None:
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=False) + "\n")


# ── Save ──────────────────────────────────────────────────────────────────────

def save_graph(graph: HeteroGraph, path: Path, labels: Optional[LabelTable] = None) -> Path:
    """Write a graph (and optionally its labels) as a container directory."""
    path.mkdir(parents=True, exist_ok=True)
    schema = graph.schema
    atomic_write_json(path / "schema.json", schema.model_dump(mode="json"))

    for spec in schema.node_types:
        frame = pd.DataFrame(graph.node_features[spec.name], columns=spec.feature_names)
        frame.insert(0, "id", graph.node_ids[spec.name])
        atomic_write_csv(path / f"nodes_{spec.name}.csv", frame)

    for step, block in graph.edges.items():
        names = schema.edge_type(step.edge_type).feature_names
        # restore input order so that a reload rebuilds an identical layout
        order = np.argsort(block.position, kind="stable")
        frame = pd.DataFrame(block.features[order], columns=names)
        frame.insert(0, "dst_id", graph.node_ids[step.target_type][block.dst[order]])
        frame.insert(0, "src_id", graph.node_ids[step.source_type][block.src[order]])
        atomic_write_csv(path / f"edges_{step.key}.csv", frame)

    if labels is not None:
        frame = pd.DataFrame({
            "id": graph.node_ids[labels.labeled_type],
            "label": labels.labels.astype(np.int64),
        })
        atomic_write_csv(path / f"labels_{labels.labeled_type}.csv", frame)

    logger.info("Saved graph container to %s (%d nodes, %d edges)",
                path, graph.num_nodes(), graph.num_edges())
    return path


# ── Load ──────────────────────────────────────────────────────────────────────

def load_schema(path: Path) -> HeteroSchema:
    schema_path = path / "schema.json"
    if not schema_path.exists():
        raise FileNotFoundError(f"Graph container has no schema.json: {path}")
    with open(schema_path, encoding="utf-8") as f:
        return HeteroSchema.model_validate(json.load(f))


def _read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, sep=",", decimal=".", encoding="utf-8")


def load_graph(path: Path) -> HeteroGraph:
    """Read a container directory into a HeteroGraph (labels via :func:`load_labels`)."""
    schema = load_schema(path)

    node_tables: dict[str, np.ndarray] = {}
    node_ids: dict[str, np.ndarray] = {}
    id_maps: dict[str, pd.Series] = {}
    for spec in schema.node_types:
        file = path / f"nodes_{spec.name}.csv"
        if not file.exists():
            raise FileNotFoundError(f"Missing node table: {file}")
        frame = _read_csv(file)
        table = file.stem
        if "id" not in frame.columns:
            raise GraphError(f"{table}: missing 'id' column")
        ids = frame["id"].to_numpy(dtype=np.int64)
        if (ids < 0).any():
            raise GraphError(f"{table} row {int(np.flatnonzero(ids < 0)[0])}: negative id")
        duplicated = pd.Series(ids).duplicated().to_numpy()
        if duplicated.any():
            row = int(np.flatnonzero(duplicated)[0])
            raise GraphError(f"{table} row {row}: duplicate id {int(ids[row])}")
        feats = frame.drop(columns=["id"]).to_numpy(dtype=np.float64)
        if feats.shape[1] != spec.dim:
            raise GraphError(f"{table}: expected {spec.dim} feature columns, got {feats.shape[1]}")
        node_tables[spec.name] = feats
        node_ids[spec.name] = ids
        id_maps[spec.name] = pd.Series(np.arange(ids.shape[0], dtype=np.int64), index=ids)

    edge_tables: dict[str, EdgeTable] = {}
    for step in schema.allowed_meta_steps:
        file = path / f"edges_{step.key}.csv"
        if not file.exists():
            continue
        frame = _read_csv(file)
        table = file.stem
        for column in ("src_id", "dst_id"):
            if column not in frame.columns:
                raise GraphError(f"{table}: missing {column!r} column")
        src = _map_ids(frame["src_id"], id_maps[step.source_type], table, "src_id")
        dst = _map_ids(frame["dst_id"], id_maps[step.target_type], table, "dst_id")
        feats = frame.drop(columns=["src_id", "dst_id"]).to_numpy(dtype=np.float64)
        edge_tables[step.key] = EdgeTable(src=src, dst=dst, features=feats)

    return build_graph(schema, node_tables, edge_tables, node_ids=node_ids)


def _map_ids(column: pd.Series, id_map: pd.Series, table: str, name: str) -> np.ndarray:
    mapped = column.map(id_map)
    missing = mapped.isna().to_numpy()
    if missing.any():
        row = int(np.flatnonzero(missing)[0])
        raise GraphError(f"{table} row {row}: {name} {column.iloc[row]} is not a known node id")
    return mapped.to_numpy(dtype=np.int64)


def load_labels(path: Path, graph: HeteroGraph, labeled_type: str = "ind") -> LabelTable:
    """Read ``labels_<type>.csv`` aligned to the graph's dense node order."""
    file = path / f"labels_{labeled_type}.csv"
    if not file.exists():
        raise FileNotFoundError(f"Missing label table: {file}")
    frame = _read_csv(file)
    ids = graph.node_ids[labeled_type]
    if frame.shape[0] != ids.shape[0]:
        raise GraphError(f"{file.stem}: {frame.shape[0]} labels for {ids.shape[0]} nodes")
    by_id = pd.Series(frame["label"].to_numpy(), index=frame["id"].to_numpy())
    aligned = by_id.reindex(ids)
    if aligned.isna().any():
        row = int(np.flatnonzero(aligned.isna().to_numpy())[0])
        raise GraphError(f"{file.stem}: no label for node id {int(ids[row])}")
    return LabelTable(labeled_type=labeled_type, labels=aligned.to_numpy(dtype=np.int64))
