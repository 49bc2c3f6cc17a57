import itertools

import networkx as nx
import numpy as np
import pytest

from immunize.graph import Graph


def graph_from_nx(G):
    return Graph.from_edges([(u, v, d.get("weight", 1.0)) for u, v, d in G.edges(data=True)], nodes=G.nodes)


def to_nx(g: Graph):
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    for u, v, w in zip(g.edge_u.tolist(), g.edge_v.tolist(), g.edge_w.tolist()):
        G.add_edge(u, v, weight=w)
    return G


def dense(g: Graph):
    A = np.zeros((g.n, g.n))
    A[g.edge_u, g.edge_v] = g.edge_w
    A[g.edge_v, g.edge_u] = g.edge_w
    return A


def set_partitions(n):
    """Restricted growth strings: every set partition of range(n) once."""
    def rec(prefix, maxlab):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for lab in range(maxlab + 2):
            yield from rec(prefix + [lab], max(maxlab, lab))
    if n == 0:
        yield ()
        return
    yield from rec([0], 0)


def pairwise_modularity(A, labels, gamma=1.0):
    """Sum over all node pairs of (A_uv - gamma k_u k_v / 2m) delta(c_u, c_v) / 2m."""
    k = A.sum(axis=1)
    two_m = k.sum()
    labels = np.asarray(labels)
    same = labels[:, None] == labels[None, :]
    return float(((A - gamma * np.outer(k, k) / two_m) * same).sum() / two_m)


def brute_force_best_q(A, gamma=1.0):
    return max(pairwise_modularity(A, lab, gamma) for lab in set_partitions(A.shape[0]))


def connected_atlas(max_nodes=7, min_nodes=2):
    """Every connected graph with min_nodes..max_nodes nodes (networkx atlas)."""
    out = []
    for G in nx.graph_atlas_g():
        if min_nodes <= G.number_of_nodes() <= max_nodes and nx.is_connected(G):
            out.append(G)
    return out


def random_graph(rng, n, p):
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(edges, nodes=range(n))


@pytest.fixture
def bridge():
    """Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3."""
    return Graph.from_edges([(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


@pytest.fixture
def triangle():
    return Graph.from_edges([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def two_triangles():
    return Graph.from_edges([(0, 1), (1, 2), (0, 2), (10, 11), (11, 12), (10, 12)])


@pytest.fixture
def star4():
    """Centre 0 with leaves 1..4."""
    return Graph.from_edges([(0, i) for i in range(1, 5)])


@pytest.fixture
def star3():
    return Graph.from_edges([(0, i) for i in range(1, 4)])


@pytest.fixture
def k4():
    return Graph.from_edges(list(itertools.combinations(range(4), 2)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
