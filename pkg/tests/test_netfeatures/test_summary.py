"""Tests for src/netfeatures/summary.py."""

import numpy as np
import pytest

from src.graph.schema import EXT, IND, ORG, TXN_AMOUNT_INDEX
from src.netfeatures.errors import FeatureError
from src.netfeatures.summary import (
    UNWEIGHTED_COLUMNS,
    WEIGHTED_COLUMNS,
    extra_degree_columns,
    extra_degree_features,
    unweighted_summary,
    weighted_summary,
)

PEERS = (IND, ORG, EXT)


def scan(graph, amount=False):
    """Edge-by-edge accumulation of the individual summaries."""
    n = graph.num_nodes(IND)
    out = {t: np.zeros(n) for t in PEERS}
    inc = {t: np.zeros(n) for t in PEERS}
    role = np.zeros(n)
    for s, block in graph.edges.items():
        for e in range(block.num_edges):
            w = block.features[e, TXN_AMOUNT_INDEX] if amount else 1.0
            if s.edge_type == "role":
                role[block.src[e]] += 1
                continue
            if s.source_type == IND:
                out[s.target_type][block.src[e]] += w
            if s.target_type == IND:
                inc[s.source_type][block.dst[e]] += w
    return out, inc, role


class TestUnweighted:
    def test_columns(self):
        assert len(UNWEIGHTED_COLUMNS) == 11
        assert len(WEIGHTED_COLUMNS) == 8

    def test_tiny_rows(self, tiny_graph):
        u = unweighted_summary(tiny_graph)
        assert u[0].tolist() == [0, 1, 0, 1, 0, 2, 1, 3, 2, 5, 4]
        assert u[1].tolist() == [1, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1]
        assert u[2].tolist() == [0] * 11

    def test_matches_edge_scan(self, make_graph):
        graph = make_graph(seed=6, edges_per_step=40)
        u = unweighted_summary(graph)
        out, inc, role = scan(graph)
        for i, t in enumerate(PEERS):
            np.testing.assert_array_equal(u[:, i], out[t])
            np.testing.assert_array_equal(u[:, 3 + i], inc[t])
        np.testing.assert_array_equal(u[:, 6], role)
        np.testing.assert_array_equal(u[:, 7], u[:, 3:6].sum(axis=1))
        np.testing.assert_array_equal(u[:, 8], u[:, 0:3].sum(axis=1) + u[:, 6])
        np.testing.assert_array_equal(u[:, 9], u[:, 7] + u[:, 8])

    def test_distinct_meta_steps(self, make_graph):
        graph = make_graph(seed=6, edges_per_step=40)
        u = unweighted_summary(graph)
        self_loop = (u[:, 0] > 0) | (u[:, 3] > 0)
        expected = self_loop + (u[:, [1, 2, 4, 5, 6]] > 0).sum(axis=1)
        np.testing.assert_array_equal(u[:, 10], expected)


class TestWeighted:
    def test_tiny_row(self, tiny_graph):
        w = weighted_summary(tiny_graph, TXN_AMOUNT_INDEX)
        assert w[0].tolist() == [0, 480, 0, 50, 0, 600, 650, 480]
        assert w[2].tolist() == [0] * 8

    def test_matches_edge_scan(self, make_graph):
        graph = make_graph(seed=9, edges_per_step=40)
        w = weighted_summary(graph, TXN_AMOUNT_INDEX)
        out, inc, _ = scan(graph, amount=True)
        for i, t in enumerate(PEERS):
            np.testing.assert_allclose(w[:, i], out[t], rtol=1e-12)
            np.testing.assert_allclose(w[:, 3 + i], inc[t], rtol=1e-12)
        np.testing.assert_allclose(w[:, 6], w[:, 3:6].sum(axis=1), rtol=1e-12)

    def test_bad_amount_index(self, tiny_graph):
        with pytest.raises(FeatureError):
            weighted_summary(tiny_graph, 5)


class TestExtraDegree:
    def test_widths(self, tiny_graph):
        extra = extra_degree_features(tiny_graph, TXN_AMOUNT_INDEX)
        assert {t: x.shape[1] for t, x in extra.items()} == {IND: 6, ORG: 6, EXT: 4}
        assert len(extra_degree_columns(tiny_graph.schema, EXT)) == 4

    def test_external_values(self, tiny_graph):
        extra = extra_degree_features(tiny_graph, TXN_AMOUNT_INDEX)
        # out to ind, out to org, in from ind, in from org
        assert extra[EXT][1].tolist() == [100, 0, 0, 300]

    def test_isolated_org(self, tiny_graph):
        assert extra_degree_features(tiny_graph, TXN_AMOUNT_INDEX)[ORG][1].tolist() == [0] * 6
