"""
Input preparation shared by every model.

Raw features (amounts, counts, degrees) are heavy-tailed, so every column goes through a
signed ``log1p`` and is then standardized. Columns with zero variance become 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.graph.schema import TXN_AMOUNT_INDEX, HeteroSchema, NodeTypeSpec
from src.graph.store import EdgeBlock, HeteroGraph
from src.netfeatures.summary import extra_degree_columns, extra_degree_features

from .config import ModelConfig

logger = logging.getLogger(__name__)


def standardize(x: np.ndarray) -> np.ndarray:
    """Signed log1p followed by per-column z-scoring."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] == 0:
        return x.copy()
    z = np.sign(x) * np.log1p(np.abs(x))
    mean = z.mean(axis=0)
    std = z.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    return np.where(std > 0, (z - mean) / scale, 0.0)


def prepare_graph(
    graph: HeteroGraph,
    use_extra_degree_features: bool = False,
    amount_feature_index: int = TXN_AMOUNT_INDEX,
) -> HeteroGraph:
    """
    Transformed copy of ``graph`` for the graph models. Edge features are standardized per
    edge type, pooled over all of its meta-steps. With ``use_extra_degree_features`` the
    weighted degree columns are appended to every node type before standardizing.
    """
    node_features = dict(graph.node_features)
    schema = graph.schema
    if use_extra_degree_features:
        extra = extra_degree_features(graph, amount_feature_index)
        node_features = {t: np.hstack([x, extra[t]]) for t, x in node_features.items()}
        node_types = [
            NodeTypeSpec(
                name=spec.name,
                dim=node_features[spec.name].shape[1],
                feature_names=spec.feature_names + extra_degree_columns(schema, spec.name),
            )
            for spec in schema.node_types
        ]
        schema = schema.model_copy(update={"node_types": node_types})

    node_features = {t: standardize(x) for t, x in node_features.items()}

    edges: dict = {}
    for edge_type in schema.edge_type_names:
        steps = [s for s in graph.edges if s.edge_type == edge_type]
        if not steps:
            continue
        stacked = standardize(np.vstack([graph.edges[s].features for s in steps]))
        offset = 0
        for step in steps:
            block = graph.edges[step]
            m = block.num_edges
            edges[step] = EdgeBlock(
                step=step, src=block.src, dst=block.dst,
                features=stacked[offset:offset + m],
                indptr=block.indptr, position=block.position,
            )
            offset += m

    logger.debug("Prepared graph inputs (extra degree features: %s)", use_extra_degree_features)
    return HeteroGraph(schema=schema, node_features=node_features, edges=edges,
                       node_ids=graph.node_ids)


@dataclass(frozen=True, eq=False)
class ModelInputs:
    """What a forward pass reads: a prepared graph, or a prepared entity feature table."""

    graph: Optional[HeteroGraph] = None
    features: Optional[np.ndarray] = None

    @property
    def schema(self) -> Optional[HeteroSchema]:
        return None if self.graph is None else self.graph.schema

    @property
    def num_features(self) -> Optional[int]:
        return None if self.features is None else int(self.features.shape[1])


def prepare_inputs(
    config: ModelConfig,
    graph: Optional[HeteroGraph] = None,
    features: Optional[np.ndarray] = None,
) -> ModelInputs:
    if config.kind.is_graph_model:
        if graph is None:
            raise ValueError(f"{config.label} needs a graph")
        return ModelInputs(graph=prepare_graph(graph, config.use_extra_degree_features))
    if features is None:
        raise ValueError(f"{config.label} needs an entity feature table")
    return ModelInputs(features=standardize(features))
