"""Community-based immunization: rank the Louvain communities a seed set reaches.

The seeds' closed neighbourhoods are composed into one subgraph G'.  Louvain
is then run on the full graph at increasing resolution until at least ``k``
communities share a node with G'; those communities are returned ranked by
the fraction of their members that are seeds.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import ConvergenceError, DomainError
from .graph import Graph, NodeSet, connected_components, induced_subgraph
from .louvain import Partition, louvain
from .structural import ConstraintProfile, constraints

DEFAULT_GAMMA0 = 0.5
DEFAULT_DELTA_GAMMA = 0.1
DEFAULT_GAMMA_MAX = 64.0
DEFAULT_RNG_SEED = 42


@dataclass
class Component:
    nodes: NodeSet  # ids in the full graph
    profile: ConstraintProfile | None  # None when the component is a lone node


@dataclass
class ComposedSubgraph:
    nodes: NodeSet
    graph: Graph  # induced subgraph; graph.origin maps back to the full graph
    components: list[Component]
    constraint: np.ndarray  # per node of ``graph``; NaN for isolated nodes


def _check_seeds(g: Graph, seeds: Iterable[int]) -> set[int]:
    out = {g.check_node(int(s)) for s in seeds}
    if not out:
        raise DomainError("no spreaders: the seed set is empty")
    return out


def compose_seed_subgraph(g: Graph, seeds: Iterable[int], mode: str = "burt") -> ComposedSubgraph:
    """Union of the seeds' closed neighbourhoods, its components and their constraint.

    Components come ordered by ascending mean constraint (most brokerage
    first), then by smallest node id; single-node components go last.
    """
    seeds = _check_seeds(g, seeds)
    mask = np.zeros(g.n, dtype=bool)
    for s in seeds:
        mask[s] = True
        mask[g.neighbors(s)] = True
    nodes = np.flatnonzero(mask)
    sub = induced_subgraph(g, nodes)
    c = constraints(sub, mode=mode)
    comps = []
    for comp in connected_components(sub):
        local = sorted(comp)
        vals = c[local]
        profile = None
        if not np.isnan(vals).any():
            profile = ConstraintProfile(float(vals.min()), float(vals.mean()), float(vals.max()))
        comps.append(Component(NodeSet(sub.origin[local].tolist()), profile))
    comps.sort(key=lambda comp: (comp.profile is None,
                                 comp.profile.mean if comp.profile else 0.0,
                                 min(comp.nodes)))
    return ComposedSubgraph(NodeSet(nodes.tolist()), sub, comps, c)


@dataclass(frozen=True)
class RankedEntry:
    members: tuple  # sorted internal ids
    n_h: int
    n_c: int

    @property
    def score(self) -> float:
        return self.n_h / self.n_c


@dataclass
class RankedCommunities:
    entries: list[RankedEntry]
    gamma_final: float
    iterations: int
    partition: Partition | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.entries)

    def top(self, k: int) -> list[RankedEntry]:
        return self.entries[:k]


def rank_communities(partition: Partition, composed_nodes: NodeSet, seeds: set[int]) -> list[RankedEntry]:
    """Communities meeting G', by seed share; ties: larger, then smaller min id."""
    in_sub = np.zeros(partition.assignment.size, dtype=bool)
    in_sub[list(composed_nodes)] = True
    is_seed = np.zeros_like(in_sub)
    is_seed[list(seeds)] = True
    hit = np.unique(partition.assignment[in_sub])
    entries = []
    for cid in hit.tolist():
        members = partition.community_nodes[cid]
        entries.append(RankedEntry(tuple(members.tolist()), int(is_seed[members].sum()), int(members.size)))
    # exact rational comparison avoids float ties between e.g. 1/3 and 2/6
    entries.sort(key=lambda e: (-Fraction(e.n_h, e.n_c), -e.n_c, e.members[0]))
    return entries


@dataclass
class SweepStep:
    iteration: int
    gamma: float
    partition: Partition
    entries: list[RankedEntry]
    elapsed: float  # seconds since the sweep started

    @property
    def count(self) -> int:
        return len(self.entries)


def resolution_sweep(
    g: Graph,
    seeds: Iterable[int],
    gamma0: float = DEFAULT_GAMMA0,
    delta_gamma: float = DEFAULT_DELTA_GAMMA,
    rng_seed: int = DEFAULT_RNG_SEED,
    composed: ComposedSubgraph | None = None,
) -> Iterator[SweepStep]:
    """Endless sweep ``gamma0, gamma0 + d, gamma0 + 2d, ...`` of Louvain runs."""
    if not gamma0 > 0:
        raise DomainError(f"gamma0 must be positive, got {gamma0}")
    if not delta_gamma > 0:
        raise DomainError(f"delta_gamma must be positive, got {delta_gamma}")
    seeds = _check_seeds(g, seeds)
    if composed is None:
        composed = compose_seed_subgraph(g, seeds)
    start = time.perf_counter()
    i = 0
    while True:
        gamma = gamma0 + i * delta_gamma
        p = louvain(g, gamma, rng_seed)
        entries = rank_communities(p, composed.nodes, seeds)
        i += 1
        yield SweepStep(i, gamma, p, entries, time.perf_counter() - start)


def contain(
    g: Graph,
    seeds: Iterable[int],
    k: int,
    gamma0: float = DEFAULT_GAMMA0,
    delta_gamma: float = DEFAULT_DELTA_GAMMA,
    gamma_max: float = DEFAULT_GAMMA_MAX,
    rng_seed: int = DEFAULT_RNG_SEED,
    composed: ComposedSubgraph | None = None,
) -> RankedCommunities:
    """Raise the resolution until ``k`` communities intersect G', then rank them.

    All intersecting communities are returned, not only the top ``k``.
    """
    if k < 1:
        raise DomainError(f"budget k must be at least 1, got {k}")
    seeds = _check_seeds(g, seeds)
    if composed is None:
        composed = compose_seed_subgraph(g, seeds)
    if k > len(composed.nodes):
        raise DomainError(
            f"budget unreachable: k={k} exceeds the {len(composed.nodes)} nodes of the composed subgraph"
        )
    if gamma0 > gamma_max:
        raise DomainError(f"gamma0={gamma0} already exceeds gamma_max={gamma_max}")
    max_iter = math.floor((gamma_max - gamma0) / delta_gamma + 1e-9) + 1
    last = None
    for step in resolution_sweep(g, seeds, gamma0, delta_gamma, rng_seed, composed):
        last = step
        if step.count >= k:
            return RankedCommunities(step.entries, step.gamma, step.iteration, step.partition)
        if step.iteration >= max_iter:
            break
    raise ConvergenceError(
        f"resolution passed gamma_max={gamma_max} before {k} communities met the composed subgraph",
        gamma=None if last is None else last.gamma,
        iterations=0 if last is None else last.iteration,
        communities=0 if last is None else last.count,
        k=k,
    )


def immunized_node_set(r: RankedCommunities, k: int) -> NodeSet:
    """Union of the members of the top-``k`` communities."""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    if k > len(r.entries):
        raise DomainError(f"only {len(r.entries)} ranked communities, cannot take {k}")
    out: set[int] = set()
    for e in r.entries[:k]:
        out.update(e.members)
    return NodeSet(out)
