"""Undirected weighted graph in CSR form, plus loaders and basic queries.

Internal node ids are dense ``0..n-1`` and are assigned in ascending order
of external id (numeric order when every id is an integer, string order
otherwise).  Because of that, "smallest external id" and "smallest internal
id" coincide, which is what every deterministic tie-break in the package
relies on.
"""

from __future__ import annotations

import csv
import logging
import re
from pathlib import Path
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import DomainError, ParseError

log = logging.getLogger(__name__)

NodeSet = frozenset
_INT_RE = re.compile(r"^[+-]?\d+$")


def _sorted_ids(ids: Iterable[Hashable]) -> list:
    ids = list(ids)
    if all(isinstance(x, (int, np.integer)) and not isinstance(x, bool) for x in ids):
        return sorted(int(x) for x in ids)
    return sorted(str(x) for x in ids)


class Graph:
    """Immutable undirected graph.

    Attributes
    ----------
    n, m : int
        Node and (undirected) edge counts.
    indptr, indices, weights : ndarray
        Symmetric CSR adjacency; every edge appears once per endpoint.
    degrees : ndarray
        Weighted degree of every node.
    total_weight : float
        Sum of all weighted degrees (``2m`` for unit weights).
    edge_u, edge_v, edge_w : ndarray
        Canonical edge list with ``edge_u < edge_v``; position = edge id.
    ids : list
        External id of each internal node.
    """

    def __init__(self, n, edge_u, edge_v, edge_w, ids=None, origin=None):
        self.n = int(n)
        self.ids = list(range(self.n)) if ids is None else list(ids)
        if len(self.ids) != self.n:
            raise DomainError("id list length does not match node count")
        self.edge_u = np.asarray(edge_u, dtype=np.int64)
        self.edge_v = np.asarray(edge_v, dtype=np.int64)
        self.edge_w = np.asarray(edge_w, dtype=np.float64)
        self.m = int(self.edge_u.size)
        # positions in a parent graph, set by induced_subgraph
        self.origin = None if origin is None else np.asarray(origin, dtype=np.int64)

        rows = np.concatenate([self.edge_u, self.edge_v])
        cols = np.concatenate([self.edge_v, self.edge_u])
        vals = np.concatenate([self.edge_w, self.edge_w])
        order = np.lexsort((cols, rows))
        self.indices = cols[order]
        self.weights = vals[order]
        counts = np.bincount(rows, minlength=self.n)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.degrees = np.bincount(rows, weights=vals, minlength=self.n).astype(np.float64)
        self.total_weight = float(self.degrees.sum())
        self._index = None
        self._csr = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_arrays(cls, n, src, dst, weight=None, ids=None):
        """Build from parallel endpoint arrays of internal ids.

        Self-loops are dropped (and logged); duplicate and reversed edges are
        merged by summing their weights.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        w = np.ones(src.size) if weight is None else np.asarray(weight, dtype=np.float64)
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise DomainError("edge endpoint out of range")
        if np.any(w < 0):
            raise DomainError("edge weights must be non-negative")
        loops = src == dst
        n_loops = int(loops.sum())
        if n_loops:
            log.warning("dropped %d self-loop(s)", n_loops)
        src, dst, w = src[~loops], dst[~loops], w[~loops]
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        key = lo * max(int(n), 1) + hi
        uniq, inverse = np.unique(key, return_inverse=True)
        merged = np.bincount(inverse, weights=w, minlength=uniq.size) if uniq.size else np.zeros(0)
        g = cls(n, uniq // max(int(n), 1), uniq % max(int(n), 1), merged, ids=ids)
        g.self_loops_dropped = n_loops
        return g

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence], nodes: Iterable[Hashable] = ()):
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples of external ids.

        ``nodes`` adds ids that may have no incident edge.
        """
        edges = [tuple(e) for e in edges]
        ext = set(nodes)
        for e in edges:
            ext.add(e[0])
            ext.add(e[1])
        ids = _sorted_ids(ext)
        if ids and isinstance(ids[0], str):
            index = {x: i for i, x in enumerate(ids)}
            look = lambda x: index[str(x)]  # noqa: E731
        else:
            index = {x: i for i, x in enumerate(ids)}
            look = lambda x: index[int(x)]  # noqa: E731
        src = [look(e[0]) for e in edges]
        dst = [look(e[1]) for e in edges]
        w = [float(e[2]) if len(e) > 2 else 1.0 for e in edges]
        return cls.from_arrays(len(ids), src, dst, w, ids=ids)

    # -- queries ----------------------------------------------------------

    @property
    def index(self) -> dict:
        if self._index is None:
            self._index = {x: i for i, x in enumerate(self.ids)}
        return self._index

    def node(self, external) -> int:
        """Internal id of an external id."""
        try:
            return self.index[external]
        except KeyError:
            pass
        # tolerate "17" vs 17 mismatches coming from text files
        if isinstance(external, str) and _INT_RE.match(external.strip()):
            alt = int(external)
        else:
            alt = str(external)
        try:
            return self.index[alt]
        except KeyError:
            raise DomainError(f"unknown node id {external!r}") from None

    def nodes_of(self, externals: Iterable) -> NodeSet:
        return NodeSet(self.node(x) for x in externals)

    def external(self, nodes: Iterable[int]) -> list:
        return [self.ids[int(v)] for v in nodes]

    def check_node(self, v) -> int:
        if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
            raise DomainError(f"node id must be an integer, got {v!r}")
        if not 0 <= v < self.n:
            raise DomainError(f"node id {v} out of range for graph with {self.n} nodes")
        return int(v)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency(self, v: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.weights[lo:hi].tolist()))

    def weight(self, u: int, v: int) -> float:
        nbrs = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        if pos < nbrs.size and nbrs[pos] == v:
            return float(self.weights[self.indptr[u] + pos])
        return 0.0

    def to_csr(self) -> sparse.csr_matrix:
        if self._csr is None:
            self._csr = sparse.csr_matrix(
                (self.weights, self.indices, self.indptr), shape=(self.n, self.n)
            )
        return self._csr

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, total_weight={self.total_weight:g})"


# -- operations -------------------------------------------------------------


def neighborhood(g: Graph, v: int) -> NodeSet:
    """Open neighbourhood N(v)."""
    v = g.check_node(v)
    return NodeSet(int(u) for u in g.neighbors(v) if u != v)


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> Graph:
    """Subgraph on ``nodes`` with every edge of ``g`` between two of them.

    External ids are preserved; ``result.origin[i]`` is the id in ``g`` of
    the subgraph's node ``i``.
    """
    keep = np.array(sorted({g.check_node(int(v)) for v in nodes}), dtype=np.int64)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    mask = (remap[g.edge_u] >= 0) & (remap[g.edge_v] >= 0)
    return Graph(
        keep.size,
        remap[g.edge_u[mask]],
        remap[g.edge_v[mask]],
        g.edge_w[mask],
        ids=[g.ids[i] for i in keep.tolist()],
        origin=keep,
    )


def connected_components(g: Graph) -> list[NodeSet]:
    """Maximal connected node sets, ordered by smallest member id."""
    if g.n == 0:
        return []
    _, labels = csgraph.connected_components(g.to_csr(), directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    groups = np.split(order, bounds)
    groups.sort(key=lambda grp: grp[0])
    return [NodeSet(grp.tolist()) for grp in groups]


# -- file formats -----------------------------------------------------------


def _split(line: str, fmt: str) -> list[str]:
    if fmt == "csv":
        return [t.strip() for t in next(csv.reader([line]))]
    return line.split()


def _convert_ids(tokens: list[str]):
    if all(_INT_RE.match(t) for t in tokens):
        return [int(t) for t in tokens]
    return tokens


def load_edge_list(path, fmt: str | None = None, weighted: bool = False) -> Graph:
    """Read an edge list ("u v", "u,v", optionally with a trailing weight).

    ``fmt`` is ``"whitespace"`` or ``"csv"``; ``None`` picks csv when the
    first data line contains a comma.  Lines starting with ``#`` or ``%``
    are comments.  Node ids that all look like integers become ints.
    """
    path = Path(path)
    if fmt not in (None, "whitespace", "csv"):
        raise DomainError(f"unknown edge-list format {fmt!r}")
    want = 3 if weighted else 2
    us: list[str] = []
    vs: list[str] = []
    ws: list[float] = []
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line[0] in "#%":
                continue
            if fmt is None:
                fmt = "csv" if "," in line else "whitespace"
            toks = _split(line, fmt)
            if len(toks) != want or not all(toks):
                raise ParseError(f"expected {want} fields, got {len(toks)}", path, lineno)
            us.append(toks[0])
            vs.append(toks[1])
            if weighted:
                try:
                    w = float(toks[2])
                except ValueError:
                    raise ParseError(f"bad weight {toks[2]!r}", path, lineno) from None
                if not w >= 0:
                    raise ParseError(f"negative or NaN weight {toks[2]!r}", path, lineno)
                ws.append(w)
    if not us:
        return Graph(0, [], [], [])
    ext = _convert_ids(us + vs)
    ids = _sorted_ids(set(ext))
    index = {x: i for i, x in enumerate(ids)}
    idx = np.fromiter((index[x] for x in ext), dtype=np.int64, count=len(ext))
    half = len(us)
    return Graph.from_arrays(len(ids), idx[:half], idx[half:], ws if weighted else None, ids=ids)


def load_node_set(path, g: Graph) -> NodeSet:
    """Read one external id per line (comments allowed) into internal ids."""
    path = Path(path)
    out = set()
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line[0] in "#%":
                continue
            try:
                out.add(g.node(line))
            except DomainError as exc:
                raise ParseError(str(exc), path, lineno) from None
    return NodeSet(out)


def write_node_set(path, g: Graph, nodes: Iterable[int]) -> None:
    with Path(path).open("w") as fh:
        for x in g.external(sorted(nodes)):
            fh.write(f"{x}\n")


def write_edge_list(path, g: Graph, weighted: bool = False) -> None:
    with Path(path).open("w") as fh:
        for u, v, w in zip(g.edge_u.tolist(), g.edge_v.tolist(), g.edge_w.tolist()):
            if weighted:
                fh.write(f"{g.ids[u]} {g.ids[v]} {w:g}\n")
            else:
                fh.write(f"{g.ids[u]} {g.ids[v]}\n")
