import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from immunize.errors import DomainError, ParseError
from immunize.graph import (
    Graph,
    connected_components,
    induced_subgraph,
    load_edge_list,
    load_node_set,
    neighborhood,
)

edge_lists = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 12), st.floats(0.1, 5.0)), max_size=40
)


def test_empty_file(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("")
    g = load_edge_list(p)
    assert (g.n, g.m) == (0, 0)


def test_comments_only_is_empty(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# header\n% other\n\n")
    assert load_edge_list(p).n == 0


def test_reversed_duplicate_merges(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("0 1\n1 0\n")
    g = load_edge_list(p)
    assert (g.n, g.m) == (2, 1)
    assert g.edge_w.tolist() == [2.0]


def test_self_loop_dropped(tmp_path, caplog):
    p = tmp_path / "e.txt"
    p.write_text("0 0\n0 1\n")
    g = load_edge_list(p)
    assert (g.n, g.m) == (2, 1)
    assert g.self_loops_dropped == 1
    assert "self-loop" in caplog.text


def test_csv_and_weights(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("a,b,2.5\nb,c,1\n")
    g = load_edge_list(p, "csv", weighted=True)
    assert g.ids == ["a", "b", "c"]
    assert g.weight(g.node("a"), g.node("b")) == 2.5
    assert g.degrees.tolist() == [2.5, 3.5, 1.0]


def test_auto_detects_csv(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("# c\n5,7\n7,9\n")
    g = load_edge_list(p)
    assert g.ids == [5, 7, 9]


def test_numeric_ids_sorted_numerically(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("10 9\n100 2\n")
    assert load_edge_list(p).ids == [2, 9, 10, 100]


@pytest.mark.parametrize("content, line", [("0 1\n0\n", 2), ("0 1 2\n", 1), ("1 2\nx y z w\n", 2)])
def test_malformed_line_reports_line_number(tmp_path, content, line):
    p = tmp_path / "bad.txt"
    p.write_text(content)
    with pytest.raises(ParseError) as exc:
        load_edge_list(p)
    assert exc.value.line == line


def test_negative_weight_rejected(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1 -1\n")
    with pytest.raises(ParseError):
        load_edge_list(p, weighted=True)


def test_node_set_file(tmp_path, bridge):
    p = tmp_path / "s.txt"
    p.write_text("# seeds\n0\n5\n")
    assert load_node_set(p, bridge) == {0, 5}
    p.write_text("0\n99\n")
    with pytest.raises(DomainError):
        load_node_set(p, bridge)


def test_induced_subgraph_examples(triangle, two_triangles):
    a, b = triangle.node("a"), triangle.node("b")
    sub = induced_subgraph(triangle, {a, b})
    assert (sub.n, sub.m) == (2, 1)
    assert sub.ids == ["a", "b"]
    assert induced_subgraph(triangle, set()).n == 0

    nodes = two_triangles.nodes_of([10, 11, 12])
    sub = induced_subgraph(two_triangles, nodes)
    # hand-enumerated edge filter
    expected = {(u, v) for u, v in zip(two_triangles.edge_u.tolist(), two_triangles.edge_v.tolist())
                if u in nodes and v in nodes}
    assert sub.m == 3 == len(expected)
    assert sub.ids == [10, 11, 12]
    assert sub.origin.tolist() == sorted(nodes)


def test_induced_subgraph_unknown_node(triangle):
    with pytest.raises(DomainError):
        induced_subgraph(triangle, {7})


def test_neighborhood_examples(star3):
    assert neighborhood(star3, 0) == {1, 2, 3}
    g = Graph.from_edges([(0, 1)], nodes=[0, 1, 2])
    assert neighborhood(g, 2) == frozenset()
    path = Graph.from_edges([("a", "b"), ("b", "c")])
    assert path.external(neighborhood(path, path.node("b"))) in (["a", "c"], ["c", "a"])
    with pytest.raises(DomainError):
        neighborhood(star3, 4)


def test_components_examples(two_triangles, bridge):
    comps = connected_components(two_triangles)
    assert [len(c) for c in comps] == [3, 3]
    assert min(comps[0]) < min(comps[1])
    assert len(connected_components(bridge)) == 1
    iso = Graph(5, [], [], [])
    assert connected_components(iso) == [frozenset({i}) for i in range(5)]


@given(edge_lists)
@settings(max_examples=60, deadline=None)
def test_graph_invariants(edges):
    g = Graph.from_edges(edges, nodes=range(13))
    # symmetric adjacency, no loops
    for v in range(g.n):
        for u, w in g.adjacency(v):
            assert u != v
            assert g.weight(u, v) == w
    assert np.allclose(g.degrees.sum(), 2 * g.edge_w.sum())
    assert g.total_weight == pytest.approx(g.degrees.sum())
    # duplicates merged by summing weights
    want = {}
    for u, v, w in edges:
        if u != v:
            key = (min(u, v), max(u, v))
            want[key] = want.get(key, 0.0) + w
    got = {(g.ids[u], g.ids[v]): w for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w)}
    assert got.keys() == want.keys()
    for key in want:
        assert got[key] == pytest.approx(want[key])


@given(edge_lists)
@settings(max_examples=40, deadline=None)
def test_induced_on_everything_is_identity(edges):
    g = Graph.from_edges(edges, nodes=range(13))
    sub = induced_subgraph(g, range(g.n))
    assert sub.ids == g.ids
    assert sub.edge_u.tolist() == g.edge_u.tolist()
    assert sub.edge_v.tolist() == g.edge_v.tolist()
    assert sub.edge_w.tolist() == g.edge_w.tolist()


@given(edge_lists)
@settings(max_examples=40, deadline=None)
def test_components_partition_nodes(edges):
    g = Graph.from_edges(edges, nodes=range(13))
    comps = connected_components(g)
    seen = set()
    for c in comps:
        assert not (seen & c)
        seen |= c
    assert seen == set(range(g.n))
    # maximal: no edge crosses two components
    label = {v: i for i, c in enumerate(comps) for v in c}
    assert all(label[u] == label[v] for u, v in zip(g.edge_u.tolist(), g.edge_v.tolist()))
