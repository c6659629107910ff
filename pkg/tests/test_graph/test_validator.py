"""Tests for src/graph/validator.py."""

import numpy as np

from src.graph.schema import IND
from src.graph.store import LabelTable
from src.graph.validator import validate_graph


class TestValidateGraph:
    def test_clean_graph(self, tiny_graph, tiny_labels):
        report = validate_graph(tiny_graph, tiny_labels,
                                node_dims={"ind": 11, "org": 8, "ext": 2},
                                edge_dims={"txn": 2, "role": 2})
        assert report.is_valid
        assert report.total_warnings == 0

    def test_dimension_mismatch_reported(self, tiny_graph):
        report = validate_graph(tiny_graph, node_dims={"ind": 12})
        assert not report.is_valid
        assert [r.table for r in report.tables_with_errors] == ["nodes_ind"]

    def test_non_finite_features(self, tiny_graph):
        tiny_graph.node_features[IND][0, 0] = np.nan
        report = validate_graph(tiny_graph)
        assert any("non-finite" in e for r in report.results for e in r.errors)

    def test_label_count_mismatch(self, tiny_graph):
        report = validate_graph(tiny_graph, LabelTable(labeled_type=IND, labels=np.array([0, 1])))
        assert report.total_errors == 1

    def test_no_positives_is_a_warning(self, tiny_graph):
        report = validate_graph(tiny_graph, LabelTable(labeled_type=IND, labels=np.zeros(3, dtype=int)))
        assert report.is_valid
        assert report.total_warnings == 1

    def test_generated_graph_is_valid(self, small_generated):
        assert validate_graph(small_generated.graph, small_generated.labels).is_valid
