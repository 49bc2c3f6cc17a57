"""Modularity with a resolution parameter and two-phase Louvain detection.

Modularity is evaluated community-wise::

    Q = sum_c [ L_c / m  -  gamma * (Sigma_tot_c / 2m)^2 ]

where ``m`` is the total edge weight, ``L_c`` the weight of edges inside
community ``c`` and ``Sigma_tot_c`` the summed weighted degree of its
members.  The local-move kernel is compiled with numba; levels, passes and
aggregation are driven from Python.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import sparse

from .errors import DomainError
from .graph import Graph

MOVE_TOL = 1e-12
MAX_PASSES = 100


@dataclass(frozen=True)
class Resolution:
    gamma: float
    delta_gamma: float = 0.1

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not self.delta_gamma > 0:
            raise DomainError(f"delta_gamma must be positive, got {self.delta_gamma}")


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to exactly one community.

    Community ids are dense and ordered by the smallest member node id.
    """

    assignment: np.ndarray
    community_nodes: list = field(repr=False)
    sigma_tot: np.ndarray = field(repr=False)
    internal_weight: np.ndarray = field(repr=False)

    @classmethod
    def from_assignment(cls, g: Graph, labels) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (g.n,):
            raise DomainError("assignment must have one entry per node")
        if g.n == 0:
            return cls(labels, [], np.zeros(0), np.zeros(0))
        # first occurrence order == smallest member id order
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        dense = rank[inverse]
        c = first.size
        sigma = np.bincount(dense, weights=g.degrees, minlength=c)
        same = dense[g.edge_u] == dense[g.edge_v]
        internal = np.bincount(dense[g.edge_u[same]], weights=g.edge_w[same], minlength=c)
        order = np.argsort(dense, kind="stable")
        members = np.split(order, np.cumsum(np.bincount(dense, minlength=c))[:-1])
        return cls(dense, members, sigma, internal)

    @classmethod
    def singletons(cls, g: Graph) -> "Partition":
        return cls.from_assignment(g, np.arange(g.n))

    @property
    def n_communities(self) -> int:
        return len(self.community_nodes)

    def __len__(self):
        return self.n_communities


def modularity(g: Graph, p: Partition, gamma: float = 1.0) -> float:
    if g.m == 0 or g.total_weight <= 0:
        raise DomainError("modularity is undefined for a graph without edges")
    if p.assignment.shape != (g.n,):
        raise DomainError("partition does not match graph")
    m = g.total_weight / 2.0
    return float(np.sum(p.internal_weight) / m - gamma * np.sum((p.sigma_tot / (2.0 * m)) ** 2))


def delta_q(k_v_in: float, k_v: float, sigma_tot: float, m: float, gamma: float = 1.0) -> float:
    """Gain of inserting an isolated node into a community.

    ``k_v_in`` is the weight of edges between the node and the community,
    ``k_v`` the node's weighted degree, ``sigma_tot`` the community's summed
    degree (node excluded) and ``m`` the total edge weight of the graph.
    """
    return k_v_in / m - gamma * sigma_tot * k_v / (2.0 * m * m)


def move_gain(g: Graph, assignment, v: int, c: int, gamma: float = 1.0) -> float:
    """Modularity change of moving ``v`` from its community into ``c``."""
    assignment = np.asarray(assignment)
    v = g.check_node(v)
    m = g.total_weight / 2.0
    old = assignment[v]
    if c == old:
        return 0.0
    nbrs = g.neighbors(v)
    w = g.weights[g.indptr[v]:g.indptr[v + 1]]
    sigma_old = float(g.degrees[assignment == old].sum() - g.degrees[v])
    sigma_new = float(g.degrees[assignment == c].sum())
    k_old = float(w[assignment[nbrs] == old].sum())
    k_new = float(w[assignment[nbrs] == c].sum())
    kv = float(g.degrees[v])
    return delta_q(k_new, kv, sigma_new, m, gamma) - delta_q(k_old, kv, sigma_old, m, gamma)


# -- compiled kernel --------------------------------------------------------

_BIG = np.iinfo(np.int64).max


@numba.njit(cache=True)
def _rescan_min(c, comm, vmin):
    best = _BIG
    for u in range(comm.size):
        if comm[u] == c and vmin[u] < best:
            best = vmin[u]
    return best


@numba.njit(cache=True)
def _move_pass(indptr, indices, weights, k, m, gamma, order, vmin,
               comm, tot, size, cmin, dirty, pos, nbw, nbc, move_tol):
    """One sweep of local moves over ``order``; returns the number of moves."""
    moved = 0
    two_m2 = 2.0 * m * m
    for idx in range(order.size):
        v = order[idx]
        old = comm[v]
        kv = k[v]
        cnt = 0
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u == v:
                continue
            c = comm[u]
            if pos[c] < 0:
                pos[c] = cnt
                nbc[cnt] = c
                nbw[c] = 0.0
                cnt += 1
            nbw[c] += weights[e]

        tot[old] -= kv
        size[old] -= 1
        if size[old] == 0:
            cmin[old] = _BIG
            dirty[old] = False
        elif vmin[v] == cmin[old]:
            dirty[old] = True

        w_old = nbw[old] if pos[old] >= 0 else 0.0
        gain_old = w_old / m - gamma * tot[old] * kv / two_m2

        best = -1
        best_gain = 0.0
        for i in range(cnt):
            c = nbc[i]
            if c == old:
                continue
            gain = nbw[c] / m - gamma * tot[c] * kv / two_m2
            tie_eps = 1e-10 * max(abs(gain), abs(best_gain)) + 1e-15
            if best < 0 or gain > best_gain + tie_eps:
                best = c
                best_gain = gain
            elif gain >= best_gain - tie_eps:
                if dirty[c]:
                    cmin[c] = _rescan_min(c, comm, vmin)
                    dirty[c] = False
                if dirty[best]:
                    cmin[best] = _rescan_min(best, comm, vmin)
                    dirty[best] = False
                if cmin[c] < cmin[best]:
                    best = c
                    best_gain = gain

        target = old
        if best >= 0 and best_gain - gain_old > move_tol:
            target = best
            moved += 1

        comm[v] = target
        tot[target] += kv
        size[target] += 1
        if not dirty[target] and vmin[v] < cmin[target]:
            cmin[target] = vmin[v]

        for i in range(cnt):
            pos[nbc[i]] = -1
    return moved


# -- driver -----------------------------------------------------------------


class _Level:
    """Graph at one aggregation level; self-loops hold internal weight."""

    def __init__(self, indptr, indices, weights, k, vmin):
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.k = k
        self.vmin = vmin
        self.n = k.size

    @classmethod
    def from_graph(cls, g: Graph):
        return cls(g.indptr, g.indices, g.weights, g.degrees.copy(), np.arange(g.n, dtype=np.int64))

    def rows(self):
        return np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))

    def modularity(self, comm, m, gamma):
        rows = self.rows()
        same = comm[rows] == comm[self.indices]
        loop = rows == self.indices
        internal = np.sum(self.weights[same & ~loop]) / 2.0 + np.sum(self.weights[loop])
        tot = np.bincount(comm, weights=self.k, minlength=self.n)
        return float(internal / m - gamma * np.sum((tot / (2.0 * m)) ** 2))

    def aggregate(self, comm):
        """Collapse communities into nodes.  Returns (level, dense labels)."""
        cmins = np.full(self.n, _BIG, dtype=np.int64)
        np.minimum.at(cmins, comm, self.vmin)
        present = np.flatnonzero(cmins < _BIG)
        present = present[np.argsort(cmins[present], kind="stable")]
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[present] = np.arange(present.size)
        labels = relabel[comm]
        c = present.size

        rows = labels[self.rows()]
        cols = labels[self.indices]
        w = self.weights
        is_loop = self.rows() == self.indices
        diag = rows == cols
        # internal arcs appear twice (once per endpoint); stored loops once
        diag_w = np.where(is_loop[diag], w[diag], 0.5 * w[diag])
        r = np.concatenate([rows[~diag], rows[diag]])
        cc = np.concatenate([cols[~diag], cols[diag]])
        ww = np.concatenate([w[~diag], diag_w])
        mat = sparse.csr_matrix((ww, (r, cc)), shape=(c, c))
        mat.sum_duplicates()
        mat.sort_indices()
        k = np.bincount(labels, weights=self.k, minlength=c)
        level = _Level(mat.indptr.astype(np.int64), mat.indices.astype(np.int64),
                       mat.data.astype(np.float64), k, cmins[present])
        return level, labels


def _local_moves(level: _Level, m, gamma, rng, trace, depth):
    n = level.n
    comm = np.arange(n, dtype=np.int64)
    tot = level.k.copy()
    size = np.ones(n, dtype=np.int64)
    cmin = level.vmin.copy()
    dirty = np.zeros(n, dtype=np.bool_)
    pos = np.full(n, -1, dtype=np.int64)
    nbw = np.zeros(n)
    nbc = np.zeros(n, dtype=np.int64)
    order = rng.permutation(n).astype(np.int64)
    total_moves = 0
    for pass_no in range(MAX_PASSES):
        moved = _move_pass(level.indptr, level.indices, level.weights, level.k, m, gamma,
                           order, level.vmin, comm, tot, size, cmin, dirty, pos, nbw, nbc,
                           MOVE_TOL)
        total_moves += moved
        if trace is not None:
            trace.append((depth, pass_no, level.modularity(comm, m, gamma)))
        if moved == 0:
            break
    return comm, total_moves


def louvain(g: Graph, gamma: float = 1.0, rng_seed: int = 42, trace: list | None = None) -> Partition:
    """Louvain community detection at resolution ``gamma``.

    Node visit order is shuffled once per level from ``rng_seed``; equal
    gains go to the community holding the smallest node id; a move needs a
    gain above ``MOVE_TOL``.  If ``trace`` is a list, ``(level, pass, Q)``
    is appended after every pass.
    """
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if g.n == 0:
        raise DomainError("louvain needs a non-empty graph")
    if g.m == 0 or g.total_weight <= 0:
        return Partition.singletons(g)
    m = g.total_weight / 2.0
    rng = np.random.default_rng(rng_seed)
    level = _Level.from_graph(g)
    membership = np.arange(g.n, dtype=np.int64)
    depth = 0
    while True:
        comm, moves = _local_moves(level, m, gamma, rng, trace, depth)
        if moves == 0:
            break
        level, labels = level.aggregate(comm)
        membership = labels[membership]
        depth += 1
        if level.n == 1:
            break
    return Partition.from_assignment(g, membership)


def write_partition_csv(path, g: Graph, p: Partition) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["external_id", "community_id"])
        for v in range(g.n):
            w.writerow([g.ids[v], int(p.assignment[v])])
