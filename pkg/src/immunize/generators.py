"""Seeded synthetic graphs with an exact node and edge count.

Used by the benchmark harness and the scale tests when the real datasets
are not on disk.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .graph import Graph


def _block_bounds(rng, n, blocks, skew):
    if skew <= 0:
        return np.linspace(0, n, blocks + 1).astype(np.int64)
    # lognormal block sizes, at least 2 nodes each
    raw = rng.lognormal(0.0, skew, blocks)
    sizes = np.maximum(2, np.floor(raw / raw.sum() * (n - 2 * blocks)).astype(np.int64) + 2)
    sizes[-1] += n - sizes.sum()
    return np.concatenate([[0], np.cumsum(sizes)])


def _draw_pairs(rng, n, count, bounds, mixing):
    """Draw ``count`` candidate pairs; a share ``1 - mixing`` stays inside a block."""
    blocks = bounds.size - 1
    sizes = np.diff(bounds)
    intra = rng.random(count) >= mixing
    u = rng.integers(0, n, count)
    v = rng.integers(0, n, count)
    if blocks > 1 and intra.any():
        b = np.searchsorted(bounds, u[intra], side="right") - 1
        v[intra] = bounds[b] + rng.integers(0, sizes[b])
    return u, v


def planted_partition(
    n: int, m: int, blocks: int = 1, mixing: float = 0.1, seed: int = 0, skew: float = 0.0
) -> Graph:
    """Simple graph with exactly ``n`` nodes and ``m`` edges.

    Nodes are split into ``blocks`` contiguous groups and each edge falls
    inside a group with probability ``1 - mixing``.  Groups have near-equal
    size when ``skew`` is 0, lognormal(0, skew) sizes otherwise.
    ``blocks=1`` gives a uniform G(n, m) graph.
    """
    if n < 2 and m > 0:
        raise DomainError("need at least two nodes for an edge")
    if m > n * (n - 1) // 2:
        raise DomainError(f"cannot place {m} edges on {n} nodes")
    blocks = max(1, min(int(blocks), n))
    rng = np.random.default_rng(seed)
    bounds = _block_bounds(rng, n, blocks, skew) if blocks > 1 else np.array([0, n])
    sizes = np.diff(bounds)
    if m > int((sizes * (sizes - 1) // 2).sum()) and mixing == 0:
        raise DomainError("blocks too small for the requested edges without mixing")
    keys = np.zeros(0, dtype=np.int64)
    while keys.size < m:
        need = m - keys.size
        u, v = _draw_pairs(rng, n, int(need * 1.2) + 16, bounds, mixing)
        keep = u != v
        lo = np.minimum(u[keep], v[keep])
        hi = np.maximum(u[keep], v[keep])
        cand = np.concatenate([keys, lo * n + hi])
        _, first = np.unique(cand, return_index=True)
        keys = cand[np.sort(first)]
    keys = keys[:m]
    return Graph.from_arrays(n, keys // n, keys % n)


def gnm(n: int, m: int, seed: int = 0) -> Graph:
    return planted_partition(n, m, blocks=1, seed=seed)


def sample_seeds(g: Graph, fraction: float = 0.10, rng_seed: int = 42) -> frozenset:
    """Uniform sample of ``floor(fraction * n)`` nodes without replacement."""
    if not 0 < fraction <= 1:
        raise DomainError(f"seed fraction must be in (0, 1], got {fraction}")
    count = int(np.floor(fraction * g.n))
    rng = np.random.default_rng(rng_seed)
    return frozenset(rng.choice(g.n, size=count, replace=False).tolist())
