"""Tests for src/graph/egonet.py."""

import networkx as nx
import pytest

from src.graph.egonet import egonet, to_networkx
from src.graph.schema import EXT, IND, ORG, ROLE, TXN
from src.graph.store import GraphError


class TestToNetworkx:
    def test_only_requested_edge_type(self, tiny_graph):
        G = to_networkx(tiny_graph, ROLE)
        assert G.number_of_edges() == 1
        assert G.number_of_nodes() == tiny_graph.num_nodes()


class TestEgonet:
    def test_zero_hops_is_the_node(self, tiny_graph):
        sub = egonet(tiny_graph, (IND, 0), 0, TXN)
        assert sub.node_counts == {IND: 1, ORG: 0, EXT: 0}
        assert sub.num_edges() == 0

    def test_one_hop_txn(self, tiny_graph):
        sub = egonet(tiny_graph, (IND, 0), 1, TXN)
        assert sub.node_counts == {IND: 2, ORG: 1, EXT: 2}
        # org0 -> ext1 links two one-hop neighbours and is kept
        assert sub.num_edges() == 5
        assert sub.node_ids[IND].tolist() == [10, 11]

    def test_role_edges_only(self, tiny_graph):
        sub = egonet(tiny_graph, (IND, 0), 9, ROLE)
        assert sub.node_counts == {IND: 1, ORG: 1, EXT: 0}
        assert all(s.edge_type == ROLE for s, b in sub.edges.items() if b.num_edges)

    def test_matches_networkx_ego_graph(self, make_graph):
        graph = make_graph(seed=7, edges_per_step=10)
        sub = egonet(graph, (IND, 3), 2, TXN)
        expected = nx.ego_graph(to_networkx(graph, TXN), (IND, 3), radius=2)
        assert sub.num_nodes() == expected.number_of_nodes()

    def test_bad_arguments(self, tiny_graph):
        with pytest.raises(GraphError):
            egonet(tiny_graph, (IND, 9), 1, TXN)
        with pytest.raises(GraphError):
            egonet(tiny_graph, (IND, 0), -1, TXN)
        with pytest.raises(GraphError):
            egonet(tiny_graph, (ORG, 0), 1, "wire")
