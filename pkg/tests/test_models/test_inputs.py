"""Tests for src/models/inputs.py."""

import numpy as np
import pytest

from src.graph.schema import EXT, IND, ORG, ROLE, TXN
from src.models.config import ModelConfig, ModelKind
from src.models.inputs import prepare_graph, prepare_inputs, standardize


class TestStandardize:
    def test_zero_mean_unit_variance(self):
        x = np.random.default_rng(0).lognormal(size=(50, 3))
        z = standardize(x)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(z.std(axis=0), 1.0)

    def test_constant_column_becomes_zero(self):
        z = standardize(np.array([[5.0, 1.0], [5.0, 2.0]]))
        assert z[:, 0].tolist() == [0.0, 0.0]

    def test_signed_log(self):
        z = standardize(np.array([[-np.e + 1], [np.e - 1]]))
        assert z[:, 0].tolist() == [-1.0, 1.0]

    def test_empty(self):
        assert standardize(np.zeros((0, 4))).shape == (0, 4)


class TestPrepareGraph:
    def test_dims_without_extra_features(self, tiny_graph):
        prepared = prepare_graph(tiny_graph)
        assert prepared.schema == tiny_graph.schema
        assert prepared.node_features[IND].shape == (3, 11)

    def test_extra_degree_dims(self, tiny_graph):
        prepared = prepare_graph(tiny_graph, use_extra_degree_features=True)
        assert [prepared.schema.node_dim(t) for t in (IND, ORG, EXT)] == [17, 14, 6]
        assert prepared.node_features[ORG].shape == (2, 14)
        assert prepared.schema.node_type(EXT).feature_names[-1] == "w_in_org__txn__ext"

    def test_edge_features_pooled_per_edge_type(self, make_graph):
        graph = make_graph(seed=3, edges_per_step=10)
        prepared = prepare_graph(graph)
        txn = np.vstack([b.features for s, b in prepared.edges.items() if s.edge_type == TXN])
        np.testing.assert_allclose(txn.mean(axis=0), 0.0, atol=1e-12)
        role = np.vstack([b.features for s, b in prepared.edges.items() if s.edge_type == ROLE])
        np.testing.assert_allclose(role.std(axis=0), 1.0)

    def test_adjacency_untouched(self, tiny_graph):
        prepared = prepare_graph(tiny_graph)
        for s, block in tiny_graph.edges.items():
            assert prepared.edges[s].src is block.src
            assert prepared.edges[s].indptr is block.indptr

    def test_source_graph_unchanged(self, tiny_graph):
        before = tiny_graph.node_features[IND].copy()
        prepare_graph(tiny_graph, use_extra_degree_features=True)
        np.testing.assert_array_equal(tiny_graph.node_features[IND], before)


class TestPrepareInputs:
    def test_graph_model(self, tiny_graph):
        inputs = prepare_inputs(ModelConfig(kind=ModelKind.HMPNN_SUM), graph=tiny_graph)
        assert inputs.features is None
        assert inputs.schema is not None

    def test_entity_model(self):
        inputs = prepare_inputs(ModelConfig(kind=ModelKind.MLP), features=np.ones((4, 3)))
        assert inputs.num_features == 3
        assert inputs.graph is None

    def test_missing_inputs(self):
        with pytest.raises(ValueError):
            prepare_inputs(ModelConfig(kind=ModelKind.HMPNN_CT))
        with pytest.raises(ValueError):
            prepare_inputs(ModelConfig(kind=ModelKind.LOGREG))
