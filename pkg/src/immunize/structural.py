"""Burt's node constraint (structural holes).

Tie proportions are row-normalised from the point of view of the node whose
constraint is measured: ``p(v, u) = w(v, u) / strength(v)``.

Two readings of the constraint sum are supported:

``"burt"`` (default)
    ``c(v) = sum_{u in N(v)} (p(v,u) + sum_{w != v} p(v,w) p(w,u))^2``,
    i.e. direct plus indirect investment of ``v`` in ``u``.
``"literal"``
    ``c(v) = sum_{u in N(v)} (p(u,v) + sum_{w in N(u)} p(u,v) p(w,v))^2``,
    the subscripts taken exactly as they are usually typeset.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable

import numba
import numpy as np

from .errors import DomainError
from .graph import Graph

MODES = ("burt", "literal")


class TieProportions:
    """Share of each node's tie strength devoted to each neighbour.

    Stored in the graph's CSR layout: ``values[indptr[v] + i]`` is
    ``p(v, indices[indptr[v] + i])``.
    """

    def __init__(self, g: Graph):
        self.graph = g
        strength = np.repeat(g.degrees, np.diff(g.indptr))
        with np.errstate(divide="ignore", invalid="ignore"):
            self.values = np.where(strength > 0, g.weights / strength, 0.0)

    def __call__(self, v: int, u: int) -> float:
        g = self.graph
        nbrs = g.neighbors(v)
        pos = np.searchsorted(nbrs, u)
        if pos < nbrs.size and nbrs[pos] == u:
            return float(self.values[g.indptr[v] + pos])
        return 0.0

    def row(self, v: int) -> dict[int, float]:
        g = self.graph
        lo, hi = g.indptr[v], g.indptr[v + 1]
        return dict(zip(g.indices[lo:hi].tolist(), self.values[lo:hi].tolist()))


def tie_proportions(g: Graph) -> TieProportions:
    return TieProportions(g)


@numba.njit(cache=True)
def _constraint_burt(indptr, indices, weights, deg, p, targets, out):
    n = indptr.size - 1
    scratch = np.zeros(n)
    for t in range(targets.size):
        v = targets[t]
        for e in range(indptr[v], indptr[v + 1]):
            scratch[indices[e]] = p[e]
        total = 0.0
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            indirect = 0.0
            for f in range(indptr[u], indptr[u + 1]):
                w = indices[f]
                if w != v and scratch[w] > 0.0:
                    # p(w, u) from w's side of the same edge
                    indirect += scratch[w] * weights[f] / deg[w]
            term = p[e] + indirect
            total += term * term
        for e in range(indptr[v], indptr[v + 1]):
            scratch[indices[e]] = 0.0
        out[t] = total


@numba.njit(cache=True)
def _constraint_literal(indptr, indices, p, targets, out):
    for t in range(targets.size):
        v = targets[t]
        total = 0.0
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            p_uv = 0.0
            inner = 0.0
            for f in range(indptr[u], indptr[u + 1]):
                w = indices[f]
                if w == v:
                    p_uv = p[f]
                    continue
                # p(w, v): find v in w's sorted neighbour list
                lo = indptr[w]
                hi = indptr[w + 1]
                while lo < hi:
                    mid = (lo + hi) // 2
                    if indices[mid] < v:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < indptr[w + 1] and indices[lo] == v:
                    inner += p[lo]
            term = p_uv + p_uv * inner
            total += term * term
        out[t] = total


def constraints(g: Graph, nodes: Iterable[int] | None = None, mode: str = "burt") -> np.ndarray:
    """Constraint of every node in ``nodes`` (all nodes by default).

    Isolated nodes get NaN; use :func:`node_constraint` for the checked
    single-node form.
    """
    if mode not in MODES:
        raise DomainError(f"unknown constraint mode {mode!r}; choose from {MODES}")
    targets = np.arange(g.n, dtype=np.int64) if nodes is None else np.asarray(list(nodes), dtype=np.int64)
    out = np.zeros(targets.size)
    if targets.size == 0:
        return out
    p = tie_proportions(g).values
    if mode == "burt":
        _constraint_burt(g.indptr, g.indices, g.weights, g.degrees, p, targets, out)
    else:
        _constraint_literal(g.indptr, g.indices, p, targets, out)
    out[g.degrees[targets] <= 0] = np.nan
    return out


def node_constraint(g: Graph, v: int, mode: str = "burt") -> float:
    v = g.check_node(v)
    if g.degrees[v] <= 0:
        raise DomainError(f"constraint undefined for isolated node {g.ids[v]!r}")
    return float(constraints(g, [v], mode)[0])


@dataclass(frozen=True)
class ConstraintProfile:
    min: float
    mean: float
    max: float

    def as_tuple(self):
        return (self.min, self.mean, self.max)


def component_constraint_profile(g: Graph, comp: Iterable[int], mode: str = "burt") -> ConstraintProfile:
    members = sorted(g.check_node(int(v)) for v in comp)
    if not members:
        raise DomainError("component is empty")
    isolated = [g.ids[v] for v in members if g.degrees[v] <= 0]
    if isolated:
        raise DomainError(f"constraint undefined for isolated node {isolated[0]!r}")
    vals = constraints(g, members, mode)
    return ConstraintProfile(float(vals.min()), float(vals.mean()), float(vals.max()))


def write_constraint_csv(path, g: Graph, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["external_id", "constraint"])
        for v in range(g.n):
            val = values[v]
            w.writerow([g.ids[v], "" if np.isnan(val) else repr(float(val))])
