"""
Parameter layout and initialization.

Weights are stored as (out × in) matrices and applied to row-major representations as
``H @ W.T``. Names:

  layer<k>/<src>__<etype>__<dst>/Wg   message network weight  (d_out·d_in(src)) × c_etype
  layer<k>/<src>__<etype>__<dst>/bg   message network bias    1 × (d_out·d_in(src))
  layer<k>/<src>__<etype>__<dst>/W    hgraphsage neighbour map d_out × d_in(src)
  layer<k>/<src>__<etype>__<dst>/B    self map                 d_out × d_in(dst)
  layer<k>/<ntype>/Wct                ct aggregation           d_out × (d_out·|S_ntype|)
  hidden<k>/{W,b}                     mlp hidden layers
  head/{W,b}                          output head on the labeled node type
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from src.graph.schema import HeteroSchema

from .config import ModelConfig, ModelKind

logger = logging.getLogger(__name__)

ModelParams = dict[str, np.ndarray]


def step_prefix(k: int, step_key: str) -> str:
    return f"layer{k}/{step_key}"


def input_dim(schema: HeteroSchema, config: ModelConfig, node_type: str, k: int) -> int:
    """d_in(type, k): raw feature width at layer 1, hidden width afterwards."""
    return schema.node_dim(node_type) if k == 1 else config.hidden_dim


def param_shapes(
    config: ModelConfig,
    schema: Optional[HeteroSchema] = None,
    num_features: Optional[int] = None,
) -> dict[str, tuple[int, int]]:
    """Every trainable tensor's name and shape, in allocation order."""
    if config.kind.is_graph_model:
        if schema is None:
            raise ValueError(f"{config.kind.value} needs a schema")
        return _graph_shapes(schema, config)
    if num_features is None:
        raise ValueError(f"{config.kind.value} needs the entity feature count")
    return _entity_shapes(num_features, config)


def _entity_shapes(num_features: int, config: ModelConfig) -> dict[str, tuple[int, int]]:
    shapes: dict[str, tuple[int, int]] = {}
    width = num_features
    hidden_layers = 0 if config.kind == ModelKind.LOGREG else config.num_layers - 1
    hidden = config.mlp_hidden_dim or num_features
    for k in range(1, hidden_layers + 1):
        shapes[f"hidden{k}/W"] = (hidden, width)
        shapes[f"hidden{k}/b"] = (1, hidden)
        width = hidden
    shapes["head/W"] = (1, width)
    shapes["head/b"] = (1, 1)
    return shapes


def _graph_shapes(schema: HeteroSchema, config: ModelConfig) -> dict[str, tuple[int, int]]:
    shapes: dict[str, tuple[int, int]] = {}
    d_out = config.hidden_dim
    for k in range(1, config.num_layers + 1):
        for step in schema.allowed_meta_steps:
            prefix = step_prefix(k, step.key)
            d_src = input_dim(schema, config, step.source_type, k)
            d_dst = input_dim(schema, config, step.target_type, k)
            if config.kind.is_edge_conditioned:
                shapes[f"{prefix}/Wg"] = (d_out * d_src, schema.edge_dim(step.edge_type))
                shapes[f"{prefix}/bg"] = (1, d_out * d_src)
            else:
                shapes[f"{prefix}/W"] = (d_out, d_src)
            shapes[f"{prefix}/B"] = (d_out, d_dst)
        if config.kind == ModelKind.HMPNN_CT:
            for node_type in schema.node_type_names:
                arity = len(schema.steps_into(node_type))
                if arity:
                    shapes[f"layer{k}/{node_type}/Wct"] = (d_out, d_out * arity)
    shapes["head/W"] = (1, d_out)
    shapes["head/b"] = (1, 1)
    return shapes


def _is_bias(name: str) -> bool:
    return name.endswith("/b") or name.endswith("/bg")


def init_params(
    schema: Optional[HeteroSchema],
    config: ModelConfig,
    num_features: Optional[int] = None,
) -> ModelParams:
    """
    Allocate every tensor for ``config``. Weights are uniform on ±sqrt(6/(fan_in+fan_out)),
    biases zero; draws follow allocation order from one generator seeded with
    ``config.seed``.
    """
    rng = np.random.default_rng(config.seed)
    params: ModelParams = {}
    for name, (rows, cols) in param_shapes(config, schema, num_features).items():
        if _is_bias(name):
            params[name] = np.zeros((rows, cols))
            continue
        fan = rows + cols
        limit = np.sqrt(6.0 / fan) if fan else 0.0
        params[name] = rng.uniform(-limit, limit, size=(rows, cols))
    logger.debug("Initialized %s K=%d: %d tensors", config.label, config.num_layers, len(params))
    return params


def count_parameters(
    schema: Optional[HeteroSchema],
    config: ModelConfig,
    num_features: Optional[int] = None,
) -> int:
    """Number of scalar trainable parameters, without allocating them."""
    return sum(r * c for r, c in param_shapes(config, schema, num_features).values())
