"""
Heterogeneous message passing on the tape.

One layer computes, for every meta-step ``s = (src, etype, dst)``, a representation of every
``dst`` node from its incoming ``s``-neighbourhood and its own previous representation, then
folds the per-meta-step blocks of each node type into the next representation. Every node
type is updated in every layer.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from src.autodiff.tensor import ShapeError, Tape, Tensor
from src.graph.schema import MetaStep
from src.graph.store import HeteroGraph

from .config import ModelConfig, ModelKind
from .params import step_prefix

ForwardState = dict[str, Tensor]


def initial_state(tape: Tape, graph: HeteroGraph) -> ForwardState:
    """H^(0): the node feature matrix of every type."""
    return {t: tape.constant(x, name=f"X/{t}") for t, x in graph.node_features.items()}


def message_pass_step(
    tape: Tape,
    graph: HeteroGraph,
    H: ForwardState,
    params: Mapping[str, Tensor],
    k: int,
    step: MetaStep,
    kind: ModelKind,
    d_out: int,
) -> Tensor:
    """
    h_v^(s,k) = σ(m_v + B h_v^(k−1)) for every target node ``v`` of ``step``.

    Edge-conditioned kinds build a (d_out × d_in) matrix per edge from its features and
    apply it to the source representation; hgraphsage applies one shared matrix. An empty
    neighbourhood gives ``m_v = 0``.
    """
    prefix = step_prefix(k, step.key)
    block = graph.block(step)
    h_src = H[step.source_type]
    h_dst = H[step.target_type]
    B = params[f"{prefix}/B"]
    if B.shape != (d_out, h_dst.cols):
        raise ShapeError(f"{prefix}/B is {B.shape}, expected {(d_out, h_dst.cols)}")

    if kind.is_edge_conditioned:
        R = tape.constant(block.features)
        G = tape.add(tape.matmul(R, params[f"{prefix}/Wg"].T), params[f"{prefix}/bg"])
        neighbours = tape.select_rows(h_src, block.src)
        edge_messages = tape.edge_bilinear(G, neighbours, d_out)
    else:
        projected = tape.matmul(h_src, params[f"{prefix}/W"].T)
        edge_messages = tape.select_rows(projected, block.src)

    messages = tape.segment_sum(edge_messages, block.indptr)
    return tape.sigmoid(tape.add(messages, tape.matmul(h_dst, B.T)))


def aggregate(
    tape: Tape,
    node_type: str,
    blocks: Sequence[Tensor],
    kind: ModelKind,
    expected: int,
    num_nodes: int,
    d_out: int,
    W_ct: Tensor | None = None,
) -> Tensor:
    """
    Fold per-meta-step blocks (schema order) into the node type's next representation:
    ``σ(Σ_s h^(s))`` for the sum kinds, ``σ(W_ct · concat_s σ(h^(s)))`` for hmpnn-ct.
    A type without incoming meta-steps aggregates nothing and sits at σ(0).
    """
    if len(blocks) != expected:
        raise ShapeError(f"aggregate {node_type!r}: {len(blocks)} blocks, schema has {expected}")
    if not blocks:
        return tape.sigmoid(tape.constant(np.zeros((num_nodes, d_out))))
    if kind == ModelKind.HMPNN_CT:
        if W_ct is None:
            raise ShapeError(f"aggregate {node_type!r}: ct variant needs its W_ct")
        stacked = tape.concat_cols([tape.sigmoid(b) for b in blocks])
        return tape.sigmoid(tape.matmul(stacked, W_ct.T))
    total = blocks[0]
    for b in blocks[1:]:
        total = tape.add(total, b)
    return tape.sigmoid(total)


def graph_layer(
    tape: Tape,
    graph: HeteroGraph,
    H: ForwardState,
    params: Mapping[str, Tensor],
    k: int,
    config: ModelConfig,
) -> ForwardState:
    schema = graph.schema
    d_out = config.hidden_dim
    new_state: ForwardState = {}
    for node_type in schema.node_type_names:
        steps = schema.steps_into(node_type)
        blocks = [message_pass_step(tape, graph, H, params, k, s, config.kind, d_out) for s in steps]
        new_state[node_type] = aggregate(
            tape, node_type, blocks, config.kind,
            expected=len(steps),
            num_nodes=graph.num_nodes(node_type),
            d_out=d_out,
            W_ct=params.get(f"layer{k}/{node_type}/Wct"),
        )
    return new_state


def graph_forward(
    tape: Tape,
    graph: HeteroGraph,
    params: Mapping[str, Tensor],
    config: ModelConfig,
) -> Tensor:
    """K rounds of message passing, then the sigmoid head on the labeled node type."""
    H = initial_state(tape, graph)
    for k in range(1, config.num_layers + 1):
        H = graph_layer(tape, graph, H, params, k, config)
    return head(tape, H[config.labeled_type], params)


def head(tape: Tape, h: Tensor, params: Mapping[str, Tensor]) -> Tensor:
    logits = tape.add(tape.matmul(h, params["head/W"].T), params["head/b"])
    return tape.sigmoid(logits)
