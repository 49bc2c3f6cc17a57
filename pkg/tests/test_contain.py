from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_graph
from immunize.contain import (
    RankedCommunities,
    RankedEntry,
    compose_seed_subgraph,
    contain,
    immunized_node_set,
    rank_communities,
)
from immunize.errors import ConvergenceError, DomainError
from immunize.graph import Graph
from immunize.louvain import Partition


def test_compose_triangle(triangle):
    cs = compose_seed_subgraph(triangle, {triangle.node("a")})
    assert cs.nodes == {0, 1, 2}
    assert cs.graph.m == 3
    assert len(cs.components) == 1
    assert cs.components[0].profile.mean == pytest.approx(1.125)


def test_compose_two_triangles(two_triangles):
    cs = compose_seed_subgraph(two_triangles, two_triangles.nodes_of([0, 10]))
    assert [len(c.nodes) for c in cs.components] == [3, 3]
    assert cs.graph.ids == [0, 1, 2, 10, 11, 12]


def test_compose_errors(triangle):
    with pytest.raises(DomainError, match="no spreaders"):
        compose_seed_subgraph(triangle, set())
    with pytest.raises(DomainError):
        compose_seed_subgraph(triangle, {9})


def test_compose_orders_components_by_mean_constraint():
    # star component (centre constraint 1/4, leaves 1) vs a triangle (1.125)
    g = Graph.from_edges([(0, 1), (0, 2), (0, 3), (0, 4), (10, 11), (11, 12), (10, 12), (20, 21)],
                         nodes=[30])
    cs = compose_seed_subgraph(g, g.nodes_of([10, 0, 30]))
    means = [c.profile.mean for c in cs.components if c.profile]
    assert means == sorted(means)
    assert cs.components[-1].profile is None  # isolated seed
    assert cs.components[-1].nodes == {g.node(30)}


def test_contain_bridge(bridge):
    r = contain(bridge, {0}, k=1, gamma0=1.0)
    assert r.iterations == 1
    assert r.gamma_final == 1.0
    top = r.entries[0]
    assert top.members == (0, 1, 2)
    assert top.score == pytest.approx(1 / 3)
    assert len(r.entries) == 1  # N[0] stays inside clique A


def test_contain_singleton_scale():
    rng = np.random.default_rng(1)
    g = random_graph(rng, 12, 0.3)
    seeds = {0, 5}
    cs = compose_seed_subgraph(g, seeds)
    k = len(cs.nodes)
    r = contain(g, seeds, k=k, gamma0=0.5, delta_gamma=50.0, gamma_max=1e4)
    assert len(r.entries) >= k


def test_score_half():
    g = Graph.from_edges([(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (4, 5)])
    p = Partition.from_assignment(g, [0, 0, 0, 0, 1, 1])
    entries = rank_communities(p, frozenset({0, 1}), {0, 1})
    assert entries[0].score == 0.5
    assert (entries[0].n_h, entries[0].n_c) == (2, 4)


def test_budget_unreachable(bridge):
    with pytest.raises(DomainError, match="budget unreachable"):
        contain(bridge, {0}, k=4)
    with pytest.raises(DomainError):
        contain(bridge, {0}, k=0)


def test_gamma_max_guard():
    g = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
    with pytest.raises(ConvergenceError) as exc:
        contain(g, {0}, k=3, gamma0=0.5, delta_gamma=0.1, gamma_max=0.8)
    assert exc.value.state["iterations"] == 4


def test_immunized_node_set():
    r = RankedCommunities([RankedEntry((0, 1, 2), 1, 3), RankedEntry((3, 4, 5, 6), 1, 4)], 1.0, 1)
    assert len(immunized_node_set(r, 1)) == 3
    assert len(immunized_node_set(r, 2)) == 7
    assert immunized_node_set(r, 0) == frozenset()
    with pytest.raises(DomainError):
        immunized_node_set(r, 3)


def test_ranking_ties():
    g = Graph(9, [], [], [])
    # scores: {0,1}:1/2, {2,3,4,5}:2/4, {6}:0/1 ... ties at 1/2 go to the larger community
    p = Partition.from_assignment(g, [0, 0, 1, 1, 1, 1, 2, 3, 3])
    seeds = {0, 2, 3, 7}
    entries = rank_communities(p, frozenset(range(9)), seeds)
    assert [e.members for e in entries] == [(2, 3, 4, 5), (0, 1), (7, 8), (6,)]


@given(st.integers(0, 100_000))
@settings(max_examples=30, deadline=None)
def test_contain_properties(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 30))
    g = random_graph(rng, n, float(rng.uniform(0.1, 0.4)))
    seeds = set(rng.choice(n, size=int(rng.integers(1, 4)), replace=False).tolist())
    cs = compose_seed_subgraph(g, seeds)
    k = int(rng.integers(1, min(5, len(cs.nodes)) + 1))
    try:
        r = contain(g, seeds, k)
    except ConvergenceError:
        pytest.fail("contain did not reach the budget before gamma_max")
    assert len(r.entries) >= k
    assert r.gamma_final == pytest.approx(0.5 + (r.iterations - 1) * 0.1)
    keys = [(-Fraction(e.n_h, e.n_c), -e.n_c, e.members[0]) for e in r.entries]
    assert keys == sorted(keys)
    covered = set()
    for e in r.entries:
        assert set(e.members) & cs.nodes
        assert e.n_h <= e.n_c
        covered.update(e.members)
    assert cs.nodes <= covered
    imm = immunized_node_set(r, k)
    assert len(imm) == sum(e.n_c for e in r.entries[:k])
