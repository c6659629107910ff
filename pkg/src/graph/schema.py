"""
Heterogeneous graph schema models.

A schema declares the node types (with feature dimension), the edge types (with feature
dimension) and the ordered list of allowed meta-steps (source type, edge type, target type).
Every graph, model and feature block in the package is keyed by these declarations.
"""

from __future__ import annotations

import hashlib
import json

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SchemaError(ValueError):
    """Raised for lookups of node or edge types the schema does not declare."""


# ── Type declarations ─────────────────────────────────────────────────────────

class NodeTypeSpec(BaseModel):
    name: str
    dim: int = Field(ge=0)
    feature_names: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _default_feature_names(self) -> "NodeTypeSpec":
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.dim)]
        elif len(self.feature_names) != self.dim:
            raise ValueError(
                f"node type {self.name!r}: {len(self.feature_names)} feature names for dim {self.dim}"
            )
        return self


class EdgeTypeSpec(BaseModel):
    name: str
    dim: int = Field(ge=0)
    feature_names: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _default_feature_names(self) -> "EdgeTypeSpec":
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.dim)]
        elif len(self.feature_names) != self.dim:
            raise ValueError(
                f"edge type {self.name!r}: {len(self.feature_names)} feature names for dim {self.dim}"
            )
        return self


class MetaStep(BaseModel):
    """A length-1 typed relation (source node type, edge type, target node type)."""

    model_config = ConfigDict(frozen=True)

    source_type: str
    edge_type: str
    target_type: str

    @property
    def key(self) -> str:
        """File- and parameter-name form: ``<src>__<etype>__<dst>``."""
        return f"{self.source_type}__{self.edge_type}__{self.target_type}"

    @classmethod
    def from_key(cls, key: str) -> "MetaStep":
        parts = key.split("__")
        if len(parts) != 3:
            raise ValueError(f"not a meta-step key: {key!r}")
        return cls(source_type=parts[0], edge_type=parts[1], target_type=parts[2])

    def __str__(self) -> str:
        return f"({self.source_type}, {self.edge_type}, {self.target_type})"


# ── Schema ────────────────────────────────────────────────────────────────────

class HeteroSchema(BaseModel):
    node_types: list[NodeTypeSpec] = Field(default_factory=list)
    edge_types: list[EdgeTypeSpec] = Field(default_factory=list)
    allowed_meta_steps: list[MetaStep] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_declarations(self) -> "HeteroSchema":
        node_names = [t.name for t in self.node_types]
        edge_names = [t.name for t in self.edge_types]
        if len(set(node_names)) != len(node_names):
            raise ValueError(f"duplicate node type names: {node_names}")
        if len(set(edge_names)) != len(edge_names):
            raise ValueError(f"duplicate edge type names: {edge_names}")
        seen: set[MetaStep] = set()
        for step in self.allowed_meta_steps:
            if step.source_type not in node_names or step.target_type not in node_names:
                raise ValueError(f"meta-step {step} references an undeclared node type")
            if step.edge_type not in edge_names:
                raise ValueError(f"meta-step {step} references an undeclared edge type")
            if step in seen:
                raise ValueError(f"meta-step {step} declared twice")
            seen.add(step)
        return self

    # ── Lookups ──

    @property
    def node_type_names(self) -> list[str]:
        return [t.name for t in self.node_types]

    @property
    def edge_type_names(self) -> list[str]:
        return [t.name for t in self.edge_types]

    def node_type(self, name: str) -> NodeTypeSpec:
        for spec in self.node_types:
            if spec.name == name:
                return spec
        raise SchemaError(f"unknown node type {name!r}")

    def edge_type(self, name: str) -> EdgeTypeSpec:
        for spec in self.edge_types:
            if spec.name == name:
                return spec
        raise SchemaError(f"unknown edge type {name!r}")

    def node_dim(self, name: str) -> int:
        return self.node_type(name).dim

    def edge_dim(self, name: str) -> int:
        return self.edge_type(name).dim

    def has_meta_step(self, step: MetaStep) -> bool:
        return step in self.allowed_meta_steps

    def steps_into(self, node_type: str) -> list[MetaStep]:
        """S_ν: declared meta-steps ending at ``node_type``, in declaration order."""
        return [s for s in self.allowed_meta_steps if s.target_type == node_type]

    def steps_out_of(self, node_type: str) -> list[MetaStep]:
        return [s for s in self.allowed_meta_steps if s.source_type == node_type]

    def with_node_dims(self, dims: dict[str, int]) -> "HeteroSchema":
        """Copy of the schema with some node feature dimensions replaced (names reset)."""
        node_types = [
            NodeTypeSpec(name=t.name, dim=dims[t.name]) if t.name in dims else t
            for t in self.node_types
        ]
        return HeteroSchema(
            node_types=node_types,
            edge_types=list(self.edge_types),
            allowed_meta_steps=list(self.allowed_meta_steps),
        )


def meta_steps(schema: HeteroSchema) -> list[MetaStep]:
    """The schema's allowed meta-steps in declaration order."""
    return list(schema.allowed_meta_steps)


def schema_hash(schema: HeteroSchema) -> str:
    """sha256 of the canonical JSON form of the schema (first 16 hex chars)."""
    canonical = json.dumps(schema.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


# ── The AML transaction schema ────────────────────────────────────────────────

IND, ORG, EXT = "ind", "org", "ext"
TXN, ROLE = "txn", "role"

INDIVIDUAL_FEATURES = [f"ind_f{i}" for i in range(11)]
ORGANIZATION_FEATURES = [f"org_f{i}" for i in range(8)]
EXTERNAL_FEATURES = [f"ext_f{i}" for i in range(2)]
TXN_FEATURES = ["count", "amount"]
ROLE_FEATURES = ["role_type", "ownership"]

TXN_AMOUNT_INDEX = TXN_FEATURES.index("amount")


def aml_schema() -> HeteroSchema:
    """
    Individuals, organizations and externals joined by transaction and role edges.

    Transactions exist between every ordered pair of node types except external→external
    (the bank never sees those); role edges only point from an individual to an organization.
    """
    txn_pairs = [
        (IND, IND), (IND, ORG), (IND, EXT),
        (ORG, IND), (ORG, ORG), (ORG, EXT),
        (EXT, IND), (EXT, ORG),
    ]
    steps = [MetaStep(source_type=u, edge_type=TXN, target_type=v) for u, v in txn_pairs]
    steps.append(MetaStep(source_type=IND, edge_type=ROLE, target_type=ORG))
    return HeteroSchema(
        node_types=[
            NodeTypeSpec(name=IND, dim=11, feature_names=INDIVIDUAL_FEATURES),
            NodeTypeSpec(name=ORG, dim=8, feature_names=ORGANIZATION_FEATURES),
            NodeTypeSpec(name=EXT, dim=2, feature_names=EXTERNAL_FEATURES),
        ],
        edge_types=[
            EdgeTypeSpec(name=TXN, dim=2, feature_names=TXN_FEATURES),
            EdgeTypeSpec(name=ROLE, dim=2, feature_names=ROLE_FEATURES),
        ],
        allowed_meta_steps=steps,
    )
