"""Shared test fixtures."""

from __future__ import annotations

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from src.graph.schema import EXT, IND, ORG, ROLE, TXN, HeteroSchema, MetaStep, aml_schema
from src.graph.store import EdgeTable, HeteroGraph, LabelTable, build_graph
from src.synthgen.config import GenConfig
from src.synthgen.generator import GeneratedGraph, generate


def step(source: str, edge: str, target: str) -> MetaStep:
    return MetaStep(source_type=source, edge_type=edge, target_type=target)


def random_aml_graph(
    seed: int = 0,
    n_ind: int = 12,
    n_org: int = 4,
    n_ext: int = 5,
    edges_per_step: int = 8,
) -> HeteroGraph:
    """Random features and edges for every meta-step of the AML schema (duplicates allowed)."""
    rng = np.random.default_rng(seed)
    schema = aml_schema()
    counts = {IND: n_ind, ORG: n_org, EXT: n_ext}
    nodes = {t: rng.normal(size=(n, schema.node_dim(t))) for t, n in counts.items()}
    edges = {}
    for s in schema.allowed_meta_steps:
        m = edges_per_step if counts[s.source_type] and counts[s.target_type] else 0
        feats = np.column_stack([rng.integers(1, 5, size=m), rng.lognormal(5.0, 1.0, size=m)])
        if s.edge_type == ROLE:
            feats = np.column_stack([rng.integers(1, 4, size=m), rng.uniform(0, 1, size=m)])
        edges[s] = EdgeTable(
            src=rng.integers(0, max(counts[s.source_type], 1), size=m),
            dst=rng.integers(0, max(counts[s.target_type], 1), size=m),
            features=feats.astype(np.float64).reshape(m, 2),
        )
    return build_graph(schema, nodes, edges)


@pytest.fixture
def schema() -> HeteroSchema:
    return aml_schema()


@pytest.fixture
def tiny_graph(schema: HeteroSchema) -> HeteroGraph:
    """
    Three individuals, two organizations, two externals.

      ext0 -txn(2, 500)-> ind0 -txn(1, 480)-> org0
      ext1 -txn(1, 100)-> ind0
      ind1 -txn(3, 50)->  ind0
      ind0 -role(1, .6)-> org0
      org0 -txn(1, 300)-> ext1
      ind2 has no edges
    """
    nodes = {
        IND: np.arange(33, dtype=np.float64).reshape(3, 11),
        ORG: np.ones((2, 8)),
        EXT: np.zeros((2, 2)),
    }
    edges = {
        step(EXT, TXN, IND): EdgeTable.from_rows([(0, 0, [2, 500.0]), (1, 0, [1, 100.0])], 2),
        step(IND, TXN, IND): EdgeTable.from_rows([(1, 0, [3, 50.0])], 2),
        step(IND, TXN, ORG): EdgeTable.from_rows([(0, 0, [1, 480.0])], 2),
        step(ORG, TXN, EXT): EdgeTable.from_rows([(0, 1, [1, 300.0])], 2),
        step(IND, ROLE, ORG): EdgeTable.from_rows([(0, 0, [1, 0.6])], 2),
    }
    return build_graph(schema, nodes, edges, node_ids={IND: np.array([10, 11, 12])})


@pytest.fixture
def tiny_labels() -> LabelTable:
    return LabelTable(labeled_type=IND, labels=np.array([1, 0, 0]))


@pytest.fixture
def make_graph() -> Callable[..., HeteroGraph]:
    return random_aml_graph


@pytest.fixture(scope="session")
def small_generated() -> GeneratedGraph:
    """A generated graph big enough for every motif kind and for a stratified split."""
    return generate(GenConfig(
        n_individual=400, n_organization=40, n_external=120, prevalence=0.02, seed=3,
    ))


@pytest.fixture
def tests_dir() -> Path:
    return Path(__file__).parent


@pytest.fixture(scope="session")
def default_generated() -> GeneratedGraph:
    """The default-config graph (20 000 individuals)."""
    return generate(GenConfig())
