"""
Immutable heterogeneous multigraph store.

Nodes are identified by (node type, dense index). Edges live in one block per meta-step,
stored in compressed incoming order: edges are stably sorted by target node, so each target's
incoming edges form the contiguous range ``indptr[v]:indptr[v + 1]`` and keep their input
order inside that range.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Mapping, Optional, Union

import numpy as np

from .schema import HeteroSchema, MetaStep

logger = logging.getLogger(__name__)

NodeRef = tuple[str, int]
Direction = Literal["in", "out"]


class GraphError(ValueError):
    """Raised when graph tables are inconsistent with the schema or with each other."""


# ── Containers ────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class EdgeTable:
    """Raw edge input for one meta-step: parallel source / target index arrays plus features."""

    src: np.ndarray
    dst: np.ndarray
    features: np.ndarray

    @classmethod
    def from_rows(cls, rows: list[tuple[int, int, list[float]]], dim: int) -> "EdgeTable":
        src = np.array([r[0] for r in rows], dtype=np.int64)
        dst = np.array([r[1] for r in rows], dtype=np.int64)
        feats = np.array([r[2] for r in rows], dtype=np.float64).reshape(len(rows), dim)
        return cls(src=src, dst=dst, features=feats)

    @classmethod
    def empty(cls, dim: int) -> "EdgeTable":
        return cls(
            src=np.zeros(0, dtype=np.int64),
            dst=np.zeros(0, dtype=np.int64),
            features=np.zeros((0, dim), dtype=np.float64),
        )

    def __len__(self) -> int:
        return int(self.src.shape[0])


@dataclass(frozen=True, eq=False)
class EdgeBlock:
    """One meta-step's edges in compressed incoming (by-target) order."""

    step: MetaStep
    src: np.ndarray         # source index per edge (CSR order)
    dst: np.ndarray         # target index per edge (CSR order, non-decreasing)
    features: np.ndarray    # m × c_ε
    indptr: np.ndarray      # n_target + 1 offsets into the edge arrays
    position: np.ndarray    # original input position of each stored edge

    @property
    def num_edges(self) -> int:
        return int(self.src.shape[0])

    def incoming_range(self, v: int) -> tuple[int, int]:
        return int(self.indptr[v]), int(self.indptr[v + 1])

    @cached_property
    def in_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def out_degrees(self, num_sources: int) -> np.ndarray:
        return np.bincount(self.src, minlength=num_sources).astype(np.int64)


@dataclass(frozen=True, eq=False)
class HeteroGraph:
    schema: HeteroSchema
    node_features: dict[str, np.ndarray]
    edges: dict[MetaStep, EdgeBlock]
    node_ids: dict[str, np.ndarray] = field(default_factory=dict)

    # ── Counts ──

    @property
    def node_counts(self) -> dict[str, int]:
        return {name: int(x.shape[0]) for name, x in self.node_features.items()}

    def num_nodes(self, node_type: Optional[str] = None) -> int:
        if node_type is None:
            return sum(self.node_counts.values())
        return self.node_counts[node_type]

    def num_edges(self, step: Optional[MetaStep] = None) -> int:
        if step is None:
            return sum(b.num_edges for b in self.edges.values())
        return self.edges[step].num_edges

    def block(self, step: MetaStep) -> EdgeBlock:
        if step not in self.edges:
            raise GraphError(f"meta-step {step} is not part of this graph's schema")
        return self.edges[step]

    def out_degrees(self, step: MetaStep) -> np.ndarray:
        return self._out_degree_cache[step]

    @cached_property
    def _out_degree_cache(self) -> dict[MetaStep, np.ndarray]:
        counts = self.node_counts
        return {s: b.out_degrees(counts[s.source_type]) for s, b in self.edges.items()}

    def summary(self) -> dict[str, int]:
        out: dict[str, int] = {f"nodes_{t}": n for t, n in self.node_counts.items()}
        for step, block in self.edges.items():
            out[f"edges_{step.key}"] = block.num_edges
        out["total_nodes"] = self.num_nodes()
        out["total_edges"] = self.num_edges()
        return out


@dataclass(frozen=True, eq=False)
class LabelTable:
    labeled_type: str
    labels: np.ndarray

    def __post_init__(self) -> None:
        values = np.unique(self.labels)
        if not np.all(np.isin(values, (0, 1))):
            raise GraphError(f"labels_{self.labeled_type}: values must be 0/1, found {values.tolist()}")

    @property
    def num_positive(self) -> int:
        return int(self.labels.sum())

    @property
    def prevalence(self) -> float:
        return float(self.labels.mean()) if self.labels.size else 0.0


# ── Construction ──────────────────────────────────────────────────────────────

def _as_step(key: Union[MetaStep, str]) -> MetaStep:
    return key if isinstance(key, MetaStep) else MetaStep.from_key(key)


def build_graph(
    schema: HeteroSchema,
    node_tables: Mapping[str, np.ndarray],
    edge_tables: Mapping[Union[MetaStep, str], EdgeTable],
    node_ids: Optional[Mapping[str, np.ndarray]] = None,
) -> HeteroGraph:
    """
    Validate the tables against the schema and build the compressed incoming adjacency.

    Node types missing from ``node_tables`` get zero nodes; meta-steps missing from
    ``edge_tables`` get zero edges. Errors name the offending table and row.
    """
    for name in node_tables:
        if name not in schema.node_type_names:
            raise GraphError(f"nodes_{name}: node type not declared in schema")

    features: dict[str, np.ndarray] = {}
    for spec in schema.node_types:
        table = node_tables.get(spec.name)
        if table is None:
            table = np.zeros((0, spec.dim), dtype=np.float64)
        table = np.asarray(table, dtype=np.float64)
        if table.ndim == 1 and table.size == 0:
            table = table.reshape(0, spec.dim)
        if table.ndim != 2 or table.shape[1] != spec.dim:
            raise GraphError(
                f"nodes_{spec.name}: expected {spec.dim} feature columns, got shape {table.shape}"
            )
        features[spec.name] = table

    ids: dict[str, np.ndarray] = {}
    for name, table in features.items():
        given = None if node_ids is None else node_ids.get(name)
        if given is None:
            ids[name] = np.arange(table.shape[0], dtype=np.int64)
        else:
            given = np.asarray(given, dtype=np.int64)
            if given.shape[0] != table.shape[0]:
                raise GraphError(f"nodes_{name}: {given.shape[0]} ids for {table.shape[0]} rows")
            ids[name] = given

    counts = {name: table.shape[0] for name, table in features.items()}
    tables = {_as_step(k): v for k, v in edge_tables.items()}
    for step in tables:
        if not schema.has_meta_step(step):
            raise GraphError(f"edges_{step.key}: meta-step {step} not in schema.allowed_meta_steps")

    blocks: dict[MetaStep, EdgeBlock] = {}
    for step in schema.allowed_meta_steps:
        dim = schema.edge_dim(step.edge_type)
        table = tables.get(step, EdgeTable.empty(dim))
        blocks[step] = _build_block(step, table, dim, counts)

    graph = HeteroGraph(schema=schema, node_features=features, edges=blocks, node_ids=ids)
    logger.debug("Built graph: %s", graph.summary())
    return graph


def _build_block(step: MetaStep, table: EdgeTable, dim: int, counts: dict[str, int]) -> EdgeBlock:
    name = f"edges_{step.key}"
    src = np.asarray(table.src, dtype=np.int64).reshape(-1)
    dst = np.asarray(table.dst, dtype=np.int64).reshape(-1)
    feats = np.asarray(table.features, dtype=np.float64)
    if feats.size == 0:
        feats = feats.reshape(src.shape[0], dim)
    if src.shape[0] != dst.shape[0]:
        raise GraphError(f"{name}: {src.shape[0]} sources for {dst.shape[0]} targets")
    if feats.ndim != 2 or feats.shape != (src.shape[0], dim):
        raise GraphError(
            f"{name}: expected edge feature matrix of shape ({src.shape[0]}, {dim}), got {feats.shape}"
        )
    for label, idx, n in (("source", src, counts[step.source_type]),
                          ("target", dst, counts[step.target_type])):
        bad = np.flatnonzero((idx < 0) | (idx >= n))
        if bad.size:
            row = int(bad[0])
            raise GraphError(
                f"{name} row {row}: {label} index {int(idx[row])} out of range [0, {n})"
            )

    n_target = counts[step.target_type]
    order = np.argsort(dst, kind="stable")
    indptr = np.zeros(n_target + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n_target), out=indptr[1:])
    return EdgeBlock(
        step=step,
        src=src[order],
        dst=dst[order],
        features=feats[order],
        indptr=indptr,
        position=order.astype(np.int64),
    )


# ── Queries ───────────────────────────────────────────────────────────────────

def _check_node(graph: HeteroGraph, v: NodeRef, expected_type: str, what: str) -> int:
    node_type, index = v
    if node_type != expected_type:
        raise GraphError(f"node {v} has type {node_type!r} but {what} expects {expected_type!r}")
    n = graph.num_nodes(node_type)
    if not 0 <= index < n:
        raise GraphError(f"node {v}: index out of range [0, {n})")
    return int(index)


def incoming_neighborhood(
    graph: HeteroGraph, v: NodeRef, step: MetaStep
) -> list[tuple[int, np.ndarray]]:
    """N_μ^ε(v) with edge features, in insertion order."""
    index = _check_node(graph, v, step.target_type, f"meta-step {step} target")
    block = graph.block(step)
    lo, hi = block.incoming_range(index)
    return [(int(block.src[e]), block.features[e]) for e in range(lo, hi)]


def degree(graph: HeteroGraph, v: NodeRef, step: MetaStep, direction: Direction) -> int:
    """Count of meta-step edges entering (``in``) or leaving (``out``) node ``v``."""
    if direction == "in":
        index = _check_node(graph, v, step.target_type, f"in-degree over {step}")
        return int(graph.block(step).in_degrees[index])
    if direction == "out":
        index = _check_node(graph, v, step.source_type, f"out-degree over {step}")
        return int(graph.out_degrees(step)[index])
    raise GraphError(f"direction must be 'in' or 'out', got {direction!r}")


def total_degrees(graph: HeteroGraph, node_type: str) -> np.ndarray:
    """Total degree per node of a type, ignoring edge type and direction."""
    total = np.zeros(graph.num_nodes(node_type), dtype=np.int64)
    for step, block in graph.edges.items():
        if step.target_type == node_type:
            total += block.in_degrees
        if step.source_type == node_type:
            total += graph.out_degrees(step)
    return total


def degree_histogram(graph: HeteroGraph, node_type: str, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """
    Histogram of total degree for one node type (edge type ignored).

    Returns (counts, edges) with integer-aligned bins; counts sum to the node count.
    """
    degrees = total_degrees(graph, node_type)
    top = int(degrees.max()) if degrees.size else 0
    edges = np.unique(np.linspace(0, top + 1, num=min(bins, top + 1) + 1).round()).astype(np.int64)
    counts, _ = np.histogram(degrees, bins=edges)
    return counts.astype(np.int64), edges
