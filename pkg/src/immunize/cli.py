"""Command-line front end: ``immunize <subcommand> [options]``.

Option precedence is command-line flag, then ``--config`` file
(``key = value`` lines, keys spelled like the long flags), then built-in
defaults.  ``IMMUNIZE_RNG_SEED`` overrides the default random seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import harness
from .baselines import ALGORITHMS
from .contain import DEFAULT_DELTA_GAMMA, DEFAULT_GAMMA0, DEFAULT_GAMMA_MAX
from .errors import ImmunizeError
from .generators import planted_partition, sample_seeds
from .graph import Graph, load_edge_list, load_node_set, write_node_set
from .icm import CascadeConfig, simulate
from .louvain import louvain, modularity, write_partition_csv
from .structural import MODES, constraints, write_constraint_csv

log = logging.getLogger("immunize")

def _default_seed() -> int:
    raw = os.environ.get("IMMUNIZE_RNG_SEED")
    if raw is None or raw.strip() == "":
        return 42
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"IMMUNIZE_RNG_SEED must be an integer, got {raw!r}")


def _common(needs_graph=True, needs_seeds=False) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value file with option defaults")
    p.add_argument("--graph", required=needs_graph, help="edge-list file")
    p.add_argument("--graph-format", choices=["auto", "whitespace", "csv"], default="auto")
    p.add_argument("--weighted", action="store_true", help="edge list has a weight column")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--format", choices=["csv", "json"], default="json", dest="out_format")
    p.add_argument("--rng-seed", type=int, default=_default_seed())
    p.add_argument("--dataset", default=None, help="label for result rows (default: graph file stem)")
    p.add_argument("-v", "--verbose", action="store_true")
    if needs_seeds:
        p.add_argument("--seeds", help="file with one external node id per line (wins over --seed-fraction)")
        p.add_argument("--seed-fraction", type=float, default=0.10,
                       help="sample this fraction of nodes as seeds (default 0.10)")
    return p


def _contain_opts(p):
    p.add_argument("--k", type=int, default=harness.DEFAULT_K, help="number of communities")
    p.add_argument("--gamma0", type=float, default=DEFAULT_GAMMA0)
    p.add_argument("--delta-gamma", type=float, default=DEFAULT_DELTA_GAMMA)
    p.add_argument("--gamma-max", type=float, default=DEFAULT_GAMMA_MAX)


def _shield_opts(p):
    p.add_argument("--budget", type=int, default=None, help="node budget (default: number of seeds)")
    p.add_argument("--budget-search", action="store_true",
                   help="grow the budget until the greedy order covers every seed")
    p.add_argument("--alpha", type=float, default=1.0)


def _cascade_opts(p):
    p.add_argument("--p", type=float, default=0.1, help="activation probability")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--weights-as-probabilities", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="immunize", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    seeded = _common(needs_seeds=True)

    p = sub.add_parser("contain", parents=[seeded], help="community-based immunization")
    _contain_opts(p)
    for name in ALGORITHMS:
        p = sub.add_parser(name, parents=[seeded], help=f"{name} baseline")
        _shield_opts(p)
    p = sub.add_parser("budget-search", parents=[seeded], help="seed-coverage budget of a baseline")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="sparseshield")
    p.add_argument("--alpha", type=float, default=1.0)

    p = sub.add_parser("communities", parents=[_common()], help="dump a Louvain partition")
    p.add_argument("--gamma", type=float, default=1.0)
    p = sub.add_parser("constraint", parents=[_common()], help="dump node constraint values")
    p.add_argument("--mode", choices=MODES, default="burt")

    p = sub.add_parser("converge-sweep", parents=[seeded], help="immunized count along the resolution sweep")
    _contain_opts(p)
    p.add_argument("--steps", type=int, default=50)

    p = sub.add_parser("simulate", parents=[seeded], help="ICM spread with an immunized set")
    p.add_argument("--immunized", help="node-set file (default: nothing immunized)")
    _cascade_opts(p)
    p = sub.add_parser("evaluate", parents=[seeded], help="ICM evaluation of result files")
    p.add_argument("--results", nargs="+", required=True, help="JSON records from other subcommands")
    _cascade_opts(p)

    p = sub.add_parser("bench", parents=[_common(needs_graph=False, needs_seeds=True)],
                       help="scalability protocol over datasets or a synthetic graph")
    p.add_argument("--datasets", nargs="*", default=[], help="edge-list files")
    p.add_argument("--synthetic", nargs=2, type=int, metavar=("NODES", "EDGES"))
    p.add_argument("--blocks", type=int, default=50, help="planted blocks in the synthetic graph")
    p.add_argument("--algorithms", nargs="+", default=["contain", "sparseshield"],
                   choices=["contain", *ALGORITHMS])
    _contain_opts(p)
    _shield_opts(p)
    return parser


# -- config handling --------------------------------------------------------


def read_config(path) -> list[str]:
    """Turn ``key = value`` lines into flag tokens (booleans become bare flags)."""
    tokens = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            tokens.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            tokens.extend([flag, *value.split()])
    return tokens


def _with_config(argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or not argv:
        return argv
    # config flags go right after the subcommand so explicit flags win
    return [argv[0], *read_config(known.config), *argv[1:]]


# -- helpers ----------------------------------------------------------------


def _load(args, path=None) -> Graph:
    fmt = None if args.graph_format == "auto" else args.graph_format
    path = path or args.graph
    t = time.perf_counter()
    g = load_edge_list(path, fmt, args.weighted)
    log.info("loaded %s: n=%d m=%d in %.2fs", path, g.n, g.m, time.perf_counter() - t)
    return g


def _seeds(args, g: Graph) -> frozenset:
    if getattr(args, "seeds", None):
        return load_node_set(args.seeds, g)
    return sample_seeds(g, args.seed_fraction, args.rng_seed)


def _out(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dataset(args, path=None) -> str:
    if args.dataset:
        return args.dataset
    return Path(path or args.graph).stem


def _emit_record(args, name: str, record: dict, row=None) -> None:
    out = _out(args)
    if args.out_format == "json":
        harness.write_json(out / f"{name}.json", record)
    elif "entries" in record:
        harness.write_csv(out / f"{name}.csv", harness.contain_entry_rows(record), harness.CONTAIN_ENTRY_COLUMNS)
    elif "picked" in record:
        rows = [{"rank": i + 1, "node": x} for i, x in enumerate(record["picked"])]
        harness.write_csv(out / f"{name}.csv", rows, ["rank", "node"])
    if row is not None:
        harness.write_csv(out / f"{name}_row.csv", [row], harness.RESULT_COLUMNS)
        print(",".join(harness.RESULT_COLUMNS))
        print(",".join("" if v is None else str(v) for v in harness.asdict(row).values()))


# -- subcommands ------------------------------------------------------------


def cmd_contain(args):
    g = _load(args)
    seeds = _seeds(args, g)
    write_node_set(_out(args) / "seeds.txt", g, seeds)
    row, record = harness.run_contain(g, seeds, args.k, args.gamma0, args.delta_gamma,
                                      args.gamma_max, args.rng_seed, _dataset(args))
    _emit_record(args, "contain", record, row)


def cmd_shield(args):
    g = _load(args)
    seeds = _seeds(args, g)
    write_node_set(_out(args) / "seeds.txt", g, seeds)
    row, record = harness.run_shield(g, seeds, args.command, args.budget, args.alpha,
                                     args.budget_search, _dataset(args))
    _emit_record(args, args.command, record, row)


def cmd_budget_search(args):
    g = _load(args)
    seeds = _seeds(args, g)
    row, record = harness.run_shield(g, seeds, args.algorithm, alpha=args.alpha, search=True,
                                     dataset=_dataset(args))
    _emit_record(args, f"{args.algorithm}_budget_search", record, row)


def cmd_communities(args):
    g = _load(args)
    p = louvain(g, args.gamma, args.rng_seed)
    out = _out(args) / "communities.csv"
    write_partition_csv(out, g, p)
    q = modularity(g, p, args.gamma) if g.m else float("nan")
    print(f"communities={p.n_communities} modularity={q:.6f} -> {out}")


def cmd_constraint(args):
    g = _load(args)
    out = _out(args) / "constraint.csv"
    write_constraint_csv(out, g, constraints(g, mode=args.mode))
    print(f"constraint for {g.n} nodes -> {out}")


def cmd_converge_sweep(args):
    g = _load(args)
    seeds = _seeds(args, g)
    rows = harness.converge_sweep(g, seeds, args.gamma0, args.delta_gamma, args.steps, args.k, args.rng_seed)
    out = _out(args) / "converge_sweep.csv"
    harness.write_csv(out, rows, harness.SWEEP_COLUMNS)
    print(f"{len(rows)} sweep rows -> {out}")


def _cascade(args) -> CascadeConfig:
    return CascadeConfig(args.p, args.trials, args.rng_seed, args.weights_as_probabilities)


def cmd_simulate(args):
    g = _load(args)
    seeds = _seeds(args, g)
    imm = load_node_set(args.immunized, g) if args.immunized else frozenset()
    cfg = _cascade(args)
    base = simulate(g, seeds, (), cfg)
    est = simulate(g, seeds, imm, cfg)
    row = {"algorithm": "given" if imm else "none", "budget": len(imm), "p": cfg.p, "trials": cfg.trials,
           "mean_infected": est.mean_infected, "std_infected": est.std_infected,
           "saved": base.mean_infected - est.mean_infected}
    out = _out(args) / "simulate.csv"
    harness.write_csv(out, [row], harness.SPREAD_COLUMNS)
    print(",".join(harness.SPREAD_COLUMNS))
    print(",".join(str(row[c]) for c in harness.SPREAD_COLUMNS))


def cmd_evaluate(args):
    g = _load(args)
    seeds = _seeds(args, g)
    records = []
    for path in args.results:
        p = Path(path)
        if not p.is_file():
            raise ImmunizeError(f"result file not found: {path}")
        records.append(json.loads(p.read_text()))
    rows = harness.evaluate_results(g, seeds, records, _cascade(args))
    out = _out(args) / "evaluate.csv"
    harness.write_csv(out, rows, harness.SPREAD_COLUMNS)
    print(f"{len(rows)} evaluation rows -> {out}")


def cmd_bench(args):
    graphs = []
    for path in args.datasets:
        graphs.append((Path(path).stem, _load(args, path)))
    if args.synthetic:
        n, m = args.synthetic
        graphs.append((f"synthetic_{n}_{m}", planted_partition(n, m, args.blocks, 0.1, args.rng_seed)))
    if args.graph:
        graphs.append((_dataset(args), _load(args)))
    if not graphs:
        raise ImmunizeError("bench needs --graph, --datasets or --synthetic")
    rows = []
    for name, g in graphs:
        seeds = sample_seeds(g, args.seed_fraction, args.rng_seed) if not args.seeds else load_node_set(args.seeds, g)
        for algo in args.algorithms:
            if algo == "contain":
                row, _ = harness.run_contain(g, seeds, args.k, args.gamma0, args.delta_gamma,
                                             args.gamma_max, args.rng_seed, name)
            else:
                row, _ = harness.run_shield(g, seeds, algo, args.budget, args.alpha, args.budget_search, name)
            log.info("%s %s: %d immunized in %.2fs", name, algo, row.immunized_count, row.wall_time_s)
            rows.append(row)
    out = _out(args) / "bench.csv"
    harness.write_csv(out, rows, harness.RESULT_COLUMNS)
    print(f"{len(rows)} result rows -> {out}")


COMMANDS = {
    "contain": cmd_contain,
    "netshield": cmd_shield,
    "sparseshield": cmd_shield,
    "budget-search": cmd_budget_search,
    "communities": cmd_communities,
    "constraint": cmd_constraint,
    "converge-sweep": cmd_converge_sweep,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_with_config(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ImmunizeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
