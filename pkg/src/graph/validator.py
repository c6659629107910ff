"""
Graph validator.
Audits a built graph against the schema and against expected feature dimensions, collecting
every problem into a report instead of stopping at the first one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .store import HeteroGraph, LabelTable


# ── Result types ──────────────────────────────────────────────────────────────

@dataclass
class ValidationResult:
    table: str
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return len(self.errors) == 0


@dataclass
class ValidationReport:
    results: list[ValidationResult] = field(default_factory=list)

    @property
    def total_errors(self) -> int:
        return sum(len(r.errors) for r in self.results)

    @property
    def total_warnings(self) -> int:
        return sum(len(r.warnings) for r in self.results)

    @property
    def is_valid(self) -> bool:
        return self.total_errors == 0

    @property
    def tables_with_errors(self) -> list[ValidationResult]:
        return [r for r in self.results if not r.is_valid]


# ── Checks ────────────────────────────────────────────────────────────────────

def validate_graph(
    graph: HeteroGraph,
    labels: Optional[LabelTable] = None,
    node_dims: Optional[dict[str, int]] = None,
    edge_dims: Optional[dict[str, int]] = None,
) -> ValidationReport:
    """
    Check node/edge tables, compressed adjacency and labels.

    ``node_dims`` / ``edge_dims`` pin expected feature widths (e.g. 11/8/2 and 2/2 for the
    transaction schema) on top of the schema's own declarations.
    """
    report = ValidationReport()
    schema = graph.schema

    for spec in schema.node_types:
        result = ValidationResult(table=f"nodes_{spec.name}")
        x = graph.node_features.get(spec.name)
        if x is None:
            result.errors.append("node table missing")
        else:
            if x.shape[1] != spec.dim:
                result.errors.append(f"{x.shape[1]} feature columns, schema declares {spec.dim}")
            if node_dims and spec.name in node_dims and spec.dim != node_dims[spec.name]:
                result.errors.append(f"dimension {spec.dim}, expected {node_dims[spec.name]}")
            if not np.all(np.isfinite(x)):
                result.errors.append("non-finite feature values")
            ids = graph.node_ids.get(spec.name)
            if ids is not None and np.unique(ids).shape[0] != ids.shape[0]:
                result.errors.append("duplicate node ids")
        report.results.append(result)

    if edge_dims:
        for name, dim in edge_dims.items():
            if name in schema.edge_type_names and schema.edge_dim(name) != dim:
                report.results.append(ValidationResult(
                    table=f"edge_type_{name}",
                    errors=[f"dimension {schema.edge_dim(name)}, expected {dim}"],
                ))

    counts = graph.node_counts
    for step, block in graph.edges.items():
        result = ValidationResult(table=f"edges_{step.key}")
        if not schema.has_meta_step(step):
            result.errors.append(f"meta-step {step} not in schema.allowed_meta_steps")
        if block.features.shape[0] != block.num_edges:
            result.errors.append("edge feature row count differs from edge count")
        if block.num_edges:
            if block.src.min() < 0 or block.src.max() >= counts[step.source_type]:
                result.errors.append("source index out of range")
            if block.dst.min() < 0 or block.dst.max() >= counts[step.target_type]:
                result.errors.append("target index out of range")
            if np.any(np.diff(block.dst) < 0):
                result.errors.append("edges not ordered by target")
        if block.indptr.shape[0] != counts[step.target_type] + 1:
            result.errors.append("indptr length differs from target count + 1")
        elif int(block.indptr[-1]) != block.num_edges or np.any(np.diff(block.indptr) < 0):
            result.errors.append("incoming ranges do not partition the edge list")
        if not np.all(np.isfinite(block.features)):
            result.errors.append("non-finite edge features")
        report.results.append(result)

    if labels is not None:
        result = ValidationResult(table=f"labels_{labels.labeled_type}")
        if labels.labels.shape[0] != counts.get(labels.labeled_type, -1):
            result.errors.append("label count differs from node count")
        if labels.num_positive == 0:
            result.warnings.append("no positive labels")
        report.results.append(result)

    return report
