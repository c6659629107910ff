"""
Neighbourhood summaries of individuals.

Unweighted counts and amount-weighted sums over the transaction and role meta-steps that
touch the individual node type, plus the per-type weighted degree columns that the
extra-feature HGraphSage variant appends to every node type.
"""

from __future__ import annotations

import numpy as np

from src.graph.schema import EXT, IND, ORG, ROLE, TXN, HeteroSchema, MetaStep
from src.graph.store import HeteroGraph

from .errors import FeatureError

_PEERS = (IND, ORG, EXT)

UNWEIGHTED_COLUMNS = (
    [f"out_txn_{t}" for t in _PEERS]
    + [f"in_txn_{t}" for t in _PEERS]
    + ["out_role_org", "total_in", "total_out", "total_degree", "distinct_meta_steps"]
)
WEIGHTED_COLUMNS = (
    [f"w_out_txn_{t}" for t in _PEERS]
    + [f"w_in_txn_{t}" for t in _PEERS]
    + ["w_total_in", "w_total_out"]
)


def _step(source: str, edge: str, target: str) -> MetaStep:
    return MetaStep(source_type=source, edge_type=edge, target_type=target)


def _require(schema: HeteroSchema, steps: list[MetaStep]) -> None:
    for step in steps:
        if not schema.has_meta_step(step):
            raise FeatureError(f"schema has no meta-step {step}")


def _weights(graph: HeteroGraph, step: MetaStep, amount_index: int | None) -> np.ndarray | None:
    if amount_index is None:
        return None
    block = graph.block(step)
    dim = block.features.shape[1]
    if not 0 <= amount_index < dim:
        raise FeatureError(
            f"amount feature index {amount_index} out of range for {step.edge_type!r} edges (dim {dim})"
        )
    return block.features[:, amount_index]


def _in(graph: HeteroGraph, step: MetaStep, amount_index: int | None = None) -> np.ndarray:
    block = graph.block(step)
    n = graph.num_nodes(step.target_type)
    return np.bincount(block.dst, weights=_weights(graph, step, amount_index), minlength=n)


def _out(graph: HeteroGraph, step: MetaStep, amount_index: int | None = None) -> np.ndarray:
    block = graph.block(step)
    n = graph.num_nodes(step.source_type)
    return np.bincount(block.src, weights=_weights(graph, step, amount_index), minlength=n)


def unweighted_summary(graph: HeteroGraph) -> np.ndarray:
    """n_ind × 11: per-meta-step out/in counts, role count, totals, distinct meta-steps."""
    out_steps = [_step(IND, TXN, t) for t in _PEERS]
    in_steps = [_step(t, TXN, IND) for t in _PEERS]
    role = _step(IND, ROLE, ORG)
    _require(graph.schema, out_steps + in_steps + [role])

    outs = [_out(graph, s) for s in out_steps]
    ins = [_in(graph, s) for s in in_steps]
    role_out = _out(graph, role)
    total_in = np.sum(ins, axis=0)
    total_out = np.sum(outs, axis=0) + role_out

    # ind→ind appears once among distinct meta-steps whichever direction it is used in
    self_loop = (outs[0] > 0) | (ins[0] > 0)
    distinct = (
        self_loop.astype(np.float64)
        + (outs[1] > 0) + (outs[2] > 0)
        + (ins[1] > 0) + (ins[2] > 0)
        + (role_out > 0)
    )
    columns = outs + ins + [role_out, total_in, total_out, total_in + total_out, distinct]
    return np.column_stack(columns).astype(np.float64)


def weighted_summary(graph: HeteroGraph, amount_feature_index: int) -> np.ndarray:
    """n_ind × 8: amount sums per out/in transaction meta-step, then weighted totals."""
    out_steps = [_step(IND, TXN, t) for t in _PEERS]
    in_steps = [_step(t, TXN, IND) for t in _PEERS]
    _require(graph.schema, out_steps + in_steps)
    outs = [_out(graph, s, amount_feature_index) for s in out_steps]
    ins = [_in(graph, s, amount_feature_index) for s in in_steps]
    total_in = np.sum(ins, axis=0)
    total_out = np.sum(outs, axis=0)
    return np.column_stack(outs + ins + [total_in, total_out]).astype(np.float64)


def extra_degree_features(graph: HeteroGraph, amount_feature_index: int) -> dict[str, np.ndarray]:
    """
    Weighted out- then in-degree for every transaction meta-step touching each node type,
    in schema declaration order: 6 columns for individuals and organizations, 4 for
    externals (there are no external→external transactions).
    """
    schema = graph.schema
    if TXN not in schema.edge_type_names:
        raise FeatureError("schema has no transaction edge type")
    result: dict[str, np.ndarray] = {}
    for node_type in schema.node_type_names:
        columns = [_out(graph, s, amount_feature_index)
                   for s in schema.steps_out_of(node_type) if s.edge_type == TXN]
        columns += [_in(graph, s, amount_feature_index)
                    for s in schema.steps_into(node_type) if s.edge_type == TXN]
        n = graph.num_nodes(node_type)
        result[node_type] = (np.column_stack(columns).astype(np.float64)
                             if columns else np.zeros((n, 0)))
    return result


def extra_degree_columns(schema: HeteroSchema, node_type: str) -> list[str]:
    outs = [f"w_out_{s.key}" for s in schema.steps_out_of(node_type) if s.edge_type == TXN]
    ins = [f"w_in_{s.key}" for s in schema.steps_into(node_type) if s.edge_type == TXN]
    return outs + ins
