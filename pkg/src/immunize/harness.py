"""Experiment runners shared by the CLI: one function per protocol.

Every runner times only the algorithm itself (graph loading excluded) with
``time.perf_counter`` and returns plain records ready for JSON/CSV output.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

from .baselines import budget_search, netshield, sparseshield
from .contain import (
    DEFAULT_DELTA_GAMMA,
    DEFAULT_GAMMA0,
    DEFAULT_GAMMA_MAX,
    DEFAULT_RNG_SEED,
    compose_seed_subgraph,
    contain,
    immunized_node_set,
    resolution_sweep,
)
from .errors import DomainError
from .graph import Graph
from .icm import CascadeConfig, evaluate

DEFAULT_K = 10


@dataclass
class ResultRow:
    dataset: str
    algorithm: str
    nodes: int
    edges: int
    budget: int
    immunized_count: int
    iterations: int
    gamma_final: float | None
    wall_time_s: float


RESULT_COLUMNS = [f.name for f in fields(ResultRow)]
SWEEP_COLUMNS = ["step", "gamma", "iterations", "communities", "immunized_count", "wall_time_s"]
SPREAD_COLUMNS = ["algorithm", "budget", "p", "trials", "mean_infected", "std_infected", "saved"]
CONTAIN_ENTRY_COLUMNS = ["rank", "n_h", "n_C", "score", "community_members"]


def run_contain(
    g: Graph,
    seeds: Iterable[int],
    k: int = DEFAULT_K,
    gamma0: float = DEFAULT_GAMMA0,
    delta_gamma: float = DEFAULT_DELTA_GAMMA,
    gamma_max: float = DEFAULT_GAMMA_MAX,
    rng_seed: int = DEFAULT_RNG_SEED,
    dataset: str = "",
) -> tuple[ResultRow, dict]:
    start = time.perf_counter()
    ranked = contain(g, seeds, k, gamma0, delta_gamma, gamma_max, rng_seed)
    immunized = immunized_node_set(ranked, k)
    elapsed = time.perf_counter() - start
    record = {
        "algorithm": "contain",
        "k": k,
        "gamma_final": ranked.gamma_final,
        "iterations": ranked.iterations,
        "entries": [
            {
                "community_members": g.external(e.members),
                "n_h": e.n_h,
                "n_C": e.n_c,
                "score": e.score,
            }
            for e in ranked.entries
        ],
        "immunized_count": len(immunized),
        "wall_time_ms": elapsed * 1000.0,
    }
    row = ResultRow(dataset, "contain", g.n, g.m, k, len(immunized), ranked.iterations,
                    ranked.gamma_final, elapsed)
    return row, record


def run_shield(
    g: Graph,
    seeds: Iterable[int],
    algorithm: str,
    budget: int | None = None,
    alpha: float = 1.0,
    search: bool = False,
    dataset: str = "",
) -> tuple[ResultRow, dict]:
    """NetShield/SparseShield with a fixed budget or a seed-coverage search.

    Without ``search`` and without an explicit budget, the budget is the
    number of seeds.
    """
    seeds = list(seeds)
    start = time.perf_counter()
    if search:
        budget, sel = budget_search(g, seeds, algorithm, alpha)
    else:
        if budget is None:
            budget = len(seeds)
        if algorithm == "netshield":
            sel = netshield(g, budget)
        elif algorithm == "sparseshield":
            sel = sparseshield(g, budget, alpha)
        else:
            raise DomainError(f"unknown baseline {algorithm!r}")
    elapsed = time.perf_counter() - start
    record = {
        "algorithm": algorithm,
        "budget": sel.budget,
        "picked": g.external(sel.picked),
        "lambda": sel.lam,
        "wall_time_ms": elapsed * 1000.0,
    }
    row = ResultRow(dataset, algorithm, g.n, g.m, sel.budget, len(sel.picked), 1, None, elapsed)
    return row, record


def converge_sweep(
    g: Graph,
    seeds: Iterable[int],
    gamma0: float = DEFAULT_GAMMA0,
    delta_gamma: float = DEFAULT_DELTA_GAMMA,
    steps: int = 50,
    k: int = DEFAULT_K,
    rng_seed: int = DEFAULT_RNG_SEED,
) -> list[dict]:
    """Immunized-node count along the resolution sweep.

    At each resolution the count is the size of the union of the top-``k``
    ranked communities (all of them when fewer than ``k`` meet G').
    """
    if steps < 1:
        raise DomainError(f"steps must be at least 1, got {steps}")
    seeds = list(seeds)
    composed = compose_seed_subgraph(g, seeds)
    rows = []
    for step in resolution_sweep(g, seeds, gamma0, delta_gamma, rng_seed, composed):
        top = step.entries[:k]
        rows.append({
            "step": step.iteration,
            "gamma": step.gamma,
            "iterations": step.iteration,
            "communities": step.count,
            "immunized_count": sum(e.n_c for e in top),
            "wall_time_s": step.elapsed,
        })
        if step.iteration >= steps:
            break
    return rows


def immunized_from_record(g: Graph, record: dict) -> list[int]:
    """Internal ids of the immunized nodes described by a result JSON record."""
    if "picked" in record:
        return [g.node(x) for x in record["picked"]]
    if "entries" in record:
        k = int(record.get("k", len(record["entries"])))
        out = set()
        for e in record["entries"][:k]:
            out.update(g.node(x) for x in e["community_members"])
        return sorted(out)
    raise DomainError(f"result record for {record.get('algorithm')!r} lists no immunized nodes")


def evaluate_results(g: Graph, seeds: Iterable[int], records: Sequence[dict], cfg: CascadeConfig) -> list[dict]:
    seeds = list(seeds)
    rows = []
    for rec in records:
        imm = immunized_from_record(g, rec)
        est = evaluate(g, seeds, imm, cfg)
        rows.append({
            "algorithm": rec.get("algorithm", ""),
            "budget": rec.get("k", rec.get("budget", len(imm))),
            "p": cfg.p,
            "trials": cfg.trials,
            "mean_infected": est.mean_infected,
            "std_infected": est.std_infected,
            "saved": est.saved,
        })
    return rows


# -- output -----------------------------------------------------------------


def write_csv(path, rows: Iterable, columns: Sequence[str]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(asdict(r) if isinstance(r, ResultRow) else r)


def write_json(path, record) -> None:
    with Path(path).open("w") as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")


def contain_entry_rows(record: dict) -> list[dict]:
    """Flatten a CONTAIN record's ranking into CSV rows."""
    return [
        {
            "rank": i + 1,
            "n_h": e["n_h"],
            "n_C": e["n_C"],
            "score": e["score"],
            "community_members": " ".join(str(x) for x in e["community_members"]),
        }
        for i, e in enumerate(record["entries"])
    ]
