"""
Meta-path guided random walks.

A walk starts at an individual and follows the meta-path's edge and node types, cycling
the pattern when the path returns to its start type. Edge direction is ignored when
matching a step, and the next node is drawn uniformly among the distinct qualifying
neighbours. A walker with no qualifying neighbour stops.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, model_validator

from src.graph.schema import HeteroSchema, MetaStep
from src.graph.store import HeteroGraph

from .errors import FeatureError

logger = logging.getLogger(__name__)

PAD = -1


class MetaPath(BaseModel):
    """Alternating node and edge types: ``ind-txn-org-txn-ind``."""

    node_types: list[str]
    edge_types: list[str]

    @model_validator(mode="after")
    def _check_length(self) -> "MetaPath":
        if len(self.edge_types) < 1:
            raise ValueError("a meta-path needs at least one edge")
        if len(self.node_types) != len(self.edge_types) + 1:
            raise ValueError(
                f"{len(self.node_types)} node types for {len(self.edge_types)} edge types"
            )
        return self

    @classmethod
    def parse(cls, text: str) -> "MetaPath":
        parts = text.split("-")
        return cls(node_types=parts[0::2], edge_types=parts[1::2])

    @property
    def name(self) -> str:
        tokens: list[str] = [self.node_types[0]]
        for edge, node in zip(self.edge_types, self.node_types[1:]):
            tokens += [edge, node]
        return "-".join(tokens)

    @property
    def length(self) -> int:
        return len(self.edge_types)

    @property
    def is_cyclic(self) -> bool:
        return self.node_types[0] == self.node_types[-1]

    def reversed(self) -> "MetaPath":
        return MetaPath(node_types=self.node_types[::-1], edge_types=self.edge_types[::-1])

    def pattern_step(self, i: int) -> tuple[str, str, str]:
        """(from type, edge type, to type) for the i-th transition of a walk."""
        j = i % self.length
        return self.node_types[j], self.edge_types[j], self.node_types[j + 1]

    def node_type_at(self, position: int) -> str:
        if position <= self.length:
            return self.node_types[position]
        return self.node_types[position % self.length]

    def validate_for(self, schema: HeteroSchema) -> None:
        for i in range(self.length):
            a, e, b = self.pattern_step(i)
            forward = MetaStep(source_type=a, edge_type=e, target_type=b)
            backward = MetaStep(source_type=b, edge_type=e, target_type=a)
            if not (schema.has_meta_step(forward) or schema.has_meta_step(backward)):
                raise FeatureError(f"meta-path {self.name}: no meta-step joins {a}-{e}-{b}")


# The four meta-paths behind the embedding block, in column order
FEATURE_METAPATHS = [
    MetaPath.parse("ind-txn-ind-txn-ind"),
    MetaPath.parse("ind-txn-org-txn-ind"),
    MetaPath.parse("ind-txn-ext-txn-ind"),
    MetaPath.parse("ind-role-org-txn-ind"),
]


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    """
    Walks as a padded (num_walks × walk_length) index matrix. Entry ``[w, i]`` is a dense
    index into the node type ``metapath.node_type_at(i)``; ``PAD`` past the walk's end.
    """

    metapath: MetaPath
    walks: np.ndarray
    lengths: np.ndarray

    @property
    def num_walks(self) -> int:
        return int(self.walks.shape[0])

    @property
    def walk_length(self) -> int:
        return int(self.walks.shape[1])

    @cached_property
    def position_types(self) -> list[str]:
        return [self.metapath.node_type_at(i) for i in range(self.walk_length)]

    def sequences(self) -> list[list[tuple[str, int]]]:
        types = self.position_types
        return [
            [(types[i], int(row[i])) for i in range(int(n))]
            for row, n in zip(self.walks, self.lengths)
        ]


def neighbour_matrix(graph: HeteroGraph, a: str, edge_type: str, b: str) -> sp.csr_matrix:
    """n_a × n_b boolean CSR of distinct undirected ``edge_type`` neighbours, sorted indices."""
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    for step, block in graph.edges.items():
        if step.edge_type != edge_type:
            continue
        if step.source_type == a and step.target_type == b:
            rows.append(block.src)
            cols.append(block.dst)
        if step.source_type == b and step.target_type == a:
            rows.append(block.dst)
            cols.append(block.src)
    shape = (graph.num_nodes(a), graph.num_nodes(b))
    if not rows:
        return sp.csr_matrix(shape, dtype=np.int8)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    matrix = sp.csr_matrix((np.ones(r.shape[0], dtype=np.int8), (r, c)), shape=shape)
    matrix.sum_duplicates()
    matrix.sort_indices()
    return matrix


def metapath_walks(
    graph: HeteroGraph,
    metapath: MetaPath,
    walk_length: int = 20,
    walks_per_node: int = 10,
    seed: int = 0,
) -> WalkCorpus:
    """``walks_per_node`` walks from every node of the meta-path's start type."""
    metapath.validate_for(graph.schema)
    if walk_length < 1 or walks_per_node < 1:
        raise FeatureError("walk_length and walks_per_node must be >= 1")
    if seed < 0:
        raise FeatureError(f"walk seed must be >= 0, got {seed}")
    start_type = metapath.node_types[0]
    n_start = graph.num_nodes(start_type)
    steps = walk_length - 1

    matrices = [neighbour_matrix(graph, *metapath.pattern_step(i)) for i in range(metapath.length)]

    # per start node uniforms from its own generator (seed XOR node index)
    uniforms = np.empty((n_start, walks_per_node, steps))
    for v in range(n_start):
        uniforms[v] = np.random.default_rng(seed ^ v).random((walks_per_node, steps))
    uniforms = uniforms.reshape(n_start * walks_per_node, steps)

    walks = np.full((n_start * walks_per_node, walk_length), PAD, dtype=np.int64)
    walks[:, 0] = np.repeat(np.arange(n_start, dtype=np.int64), walks_per_node)
    alive = np.ones(walks.shape[0], dtype=bool)
    max_steps = steps if metapath.is_cyclic else min(steps, metapath.length)

    for i in range(max_steps):
        matrix = matrices[i % metapath.length]
        current = walks[:, i]
        idx = np.flatnonzero(alive)
        cur = current[idx]
        start = matrix.indptr[cur]
        deg = matrix.indptr[cur + 1] - start
        stuck = deg == 0
        alive[idx[stuck]] = False
        idx, start, deg = idx[~stuck], start[~stuck], deg[~stuck]
        if idx.size == 0:
            break
        pick = np.minimum((uniforms[idx, i] * deg).astype(np.int64), deg - 1)
        walks[idx, i + 1] = matrix.indices[start + pick]

    lengths = (walks != PAD).sum(axis=1)
    logger.debug("Walked %s: %d walks, mean length %.2f",
                 metapath.name, walks.shape[0], float(lengths.mean()) if lengths.size else 0.0)
    return WalkCorpus(metapath=metapath, walks=walks, lengths=lengths)

