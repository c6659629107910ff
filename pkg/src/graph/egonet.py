"""
Homogeneous egonets.

Projects one edge type onto an undirected NetworkX graph over (type, index) nodes and cuts
out everything within ``hops`` steps of a focal node.
"""

from __future__ import annotations

import networkx as nx
import numpy as np

from .store import EdgeTable, GraphError, HeteroGraph, NodeRef, build_graph


def to_networkx(graph: HeteroGraph, edge_type: str) -> nx.MultiGraph:
    """Undirected multigraph of all nodes and the edges of one edge type."""
    G: nx.MultiGraph = nx.MultiGraph()
    for node_type, n in graph.node_counts.items():
        G.add_nodes_from(((node_type, i) for i in range(n)), node_type=node_type)
    for step, block in graph.edges.items():
        if step.edge_type != edge_type:
            continue
        G.add_edges_from(
            ((step.source_type, int(u)), (step.target_type, int(v)))
            for u, v in zip(block.src, block.dst)
        )
    return G


def egonet(graph: HeteroGraph, v: NodeRef, hops: int, edge_type: str) -> HeteroGraph:
    """
    Subgraph of the nodes reachable from ``v`` within ``hops`` undirected steps over edges of
    ``edge_type``, keeping only that edge type. Node and edge features are copied; kept
    nodes are renumbered densely in their original order and ``node_ids`` carry the
    original global ids.
    """
    if hops < 0:
        raise GraphError(f"hops must be >= 0, got {hops}")
    node_type, index = v
    if node_type not in graph.node_counts or not 0 <= index < graph.num_nodes(node_type):
        raise GraphError(f"node {v} is not in the graph")
    if edge_type not in graph.schema.edge_type_names:
        raise GraphError(f"unknown edge type {edge_type!r}")

    G = to_networkx(graph, edge_type)
    reached = nx.single_source_shortest_path_length(G, (node_type, int(index)), cutoff=hops)

    kept: dict[str, np.ndarray] = {}
    for name in graph.schema.node_type_names:
        kept[name] = np.array(sorted(i for t, i in reached if t == name), dtype=np.int64)

    remap: dict[str, np.ndarray] = {}
    for name, idx in kept.items():
        table = np.full(graph.num_nodes(name), -1, dtype=np.int64)
        table[idx] = np.arange(idx.shape[0])
        remap[name] = table

    edge_tables: dict = {}
    for step, block in graph.edges.items():
        if step.edge_type != edge_type:
            continue
        order = np.argsort(block.position, kind="stable")
        src, dst = block.src[order], block.dst[order]
        new_src, new_dst = remap[step.source_type][src], remap[step.target_type][dst]
        mask = (new_src >= 0) & (new_dst >= 0)
        edge_tables[step] = EdgeTable(
            src=new_src[mask], dst=new_dst[mask], features=block.features[order][mask]
        )

    return build_graph(
        graph.schema,
        {name: graph.node_features[name][idx] for name, idx in kept.items()},
        edge_tables,
        node_ids={name: graph.node_ids[name][idx] for name, idx in kept.items()},
    )
