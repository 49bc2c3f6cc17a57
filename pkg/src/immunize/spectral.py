"""Dominant eigenpair of the adjacency operator by power iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .graph import Graph


@dataclass(frozen=True)
class EigenPair:
    lam: float
    u: np.ndarray
    iterations: int = 0


def dominant_eigenpair(
    g: Graph, tol: float = 1e-9, max_iter: int = 1000, residual_tol: float = 1e-6
) -> EigenPair:
    """Perron eigenpair of the (weighted) adjacency matrix.

    Starts from the normalised all-ones vector.  The eigenvalue estimate is
    ``||A x||`` for the current unit iterate ``x``; iteration stops once it
    moves by at most ``tol`` over both of the last two steps, which also
    covers bipartite graphs where ``x`` alternates between two vectors.
    The returned vector is the two-step average ``x + A x / lambda``
    (removing any ``-lambda`` component), normalised and made non-negative,
    and ``lam`` is its Rayleigh quotient.  The pair is accepted only when
    ``||A u - lam u|| <= residual_tol * max(1, lam)`` as well.
    """
    if g.m == 0:
        raise DomainError("dominant eigenpair needs at least one edge")
    mv = g.to_csr().dot
    x = np.full(g.n, 1.0 / np.sqrt(g.n))
    history = []
    y = mv(x)
    for it in range(1, max_iter + 1):
        est = float(np.linalg.norm(y))
        history.append(est)
        if len(history) >= 3 and abs(history[-1] - history[-2]) <= tol and abs(history[-1] - history[-3]) <= tol:
            u = x + y / est
            u /= np.linalg.norm(u)
            np.abs(u, out=u)
            Au = mv(u)
            lam = float(u @ Au)
            if np.linalg.norm(Au - lam * u) <= residual_tol * max(1.0, lam):
                return EigenPair(lam, u, it)
        x = y / est
        y = mv(x)
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations",
        last_vector=x,
        last_estimate=history[-1] if history else None,
    )


def rayleigh_residual(g: Graph, pair: EigenPair) -> float:
    """``||A u - lambda u||``."""
    return float(np.linalg.norm(g.to_csr().dot(pair.u) - pair.lam * pair.u))
