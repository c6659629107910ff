"""Heterogeneous graph package: schema, store, container, egonets, validator."""

from .schema import (
    EXT,
    IND,
    ORG,
    ROLE,
    TXN,
    TXN_AMOUNT_INDEX,
    EdgeTypeSpec,
    HeteroSchema,
    MetaStep,
    NodeTypeSpec,
    SchemaError,
    aml_schema,
    meta_steps,
    schema_hash,
)
from .store import (
    EdgeBlock,
    EdgeTable,
    GraphError,
    HeteroGraph,
    LabelTable,
    NodeRef,
    build_graph,
    degree,
    degree_histogram,
    incoming_neighborhood,
    total_degrees,
)

__all__ = [
    "EXT", "IND", "ORG", "ROLE", "TXN", "TXN_AMOUNT_INDEX",
    "EdgeBlock", "EdgeTable", "EdgeTypeSpec", "GraphError", "HeteroGraph", "HeteroSchema",
    "LabelTable", "MetaStep", "NodeRef", "NodeTypeSpec", "SchemaError",
    "aml_schema", "build_graph", "degree", "degree_histogram", "incoming_neighborhood",
    "meta_steps", "schema_hash", "total_degrees",
]
