"""Command-line harness: ``mepcircuit {gen-table,evolve,verify,export}``."""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import os
import sys
import warnings

from .circuit import export_dot, extract_circuit, format_netlist, mismatches, parse_netlist
from .engine import EvolutionParams, run_batch
from .genome import gate_set
from .knapsack import KnapsackInstance, format_table, generate_truth_table, load_table

EXIT_OK = 0
EXIT_NO_SUCCESS = 1
EXIT_ERROR = 2

# (n, k, population, genes, generations) per benchmark row
PAPER_INSTANCES = {
    1: (4, 5, 20, 10, 51),
    2: (5, 7, 100, 30, 101),
    3: (6, 10, 500, 50, 101),
    4: (7, 14, 1000, 100, 201),
}

DEFAULTS = {
    "n": None,
    "sum": None,
    "table": None,
    "pop": 100,
    "genes": 30,
    "generations": 101,
    "runs": 100,
    "seed": 0,
    "crossover_prob": 0.9,
    "mutations": 5,
    "mutation_mode": "exact",
    "p_function": 0.5,
    "stop_on_success": True,
    "workers": None,
    "out": None,
    "summary": None,
    "timestamp": True,
}

CSV_FIELDS = [
    "run_id", "seed", "success", "best_fitness", "first_hit_generation", "best_gene",
    "best_gene_gates", "gate_count", "evaluations", "netlist",
]


class UsageError(Exception):
    pass


def _write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# --------------------------------------------------------------------------
# gen-table


def cmd_gen_table(args) -> int:
    inst = KnapsackInstance(args.n, args.sum)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = generate_truth_table(inst)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write_text(format_table(table), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# evolve


def resolve_config(args) -> dict:
    """Merge defaults, config file, benchmark preset and explicit flags (in that order)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(_read_text(args.config))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: invalid JSON ({exc})") from None
        unknown = set(loaded) - set(cfg) - {"paper_instance"}
        if unknown:
            raise UsageError(f"{args.config}: unknown keys {sorted(unknown)}")
        cfg.update(loaded)
    preset = args.paper_instance or cfg.pop("paper_instance", None)
    cfg.pop("paper_instance", None)
    if preset is not None:
        if preset not in PAPER_INSTANCES:
            raise UsageError("--paper-instance must be 1..4")
        n, k, pop, genes, gens = PAPER_INSTANCES[preset]
        cfg.update(n=n, sum=k, pop=pop, genes=genes, generations=gens, table=None)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if cfg["table"] is None and (cfg["n"] is None or cfg["sum"] is None):
        raise UsageError("give --table, --n and --sum, or --paper-instance")
    return cfg


def _load_target(cfg: dict):
    if cfg["table"] is not None:
        try:
            table = load_table(cfg["table"])
        except ValueError as exc:
            raise UsageError(f"{cfg['table']}: {exc}") from None
        except OSError as exc:
            raise UsageError(f"cannot read {cfg['table']}: {exc.strerror}") from None
        if cfg["n"] is not None and cfg["n"] != table.n:
            raise UsageError(f"--n {cfg['n']} disagrees with table ({table.n} inputs)")
        return table
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = generate_truth_table(KnapsackInstance(cfg["n"], cfg["sum"]))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return table


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def records_csv(stats, n: int, header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in stats.records:
        nl = r.shortest or extract_circuit(r.chromosome, r.best_gene, n)
        netlist = "; ".join(format_netlist(nl).strip().splitlines())
        writer.writerow([_fmt(v) for v in (
            r.run_id, r.seed, r.success, r.best_fitness, r.first_hit_generation, r.best_gene,
            r.best_gene_gates, r.gate_count, r.evaluations, netlist)])
    return buf.getvalue()


def cmd_evolve(args) -> int:
    cfg = resolve_config(args)
    table = _load_target(cfg)
    params = EvolutionParams(
        population_size=cfg["pop"],
        chromosome_length=cfg["genes"],
        generations=cfg["generations"],
        crossover_probability=cfg["crossover_prob"],
        mutations_per_chromosome=cfg["mutations"],
        p_function=cfg["p_function"],
        stop_on_success=cfg["stop_on_success"],
        seed=cfg["seed"],
        mutation_mode=cfg["mutation_mode"],
    )
    workers = cfg["workers"] or os.cpu_count() or 1
    stats = run_batch(params, gate_set(table.n), table, cfg["runs"], cfg["seed"], workers)

    header = None
    if cfg["timestamp"]:
        now = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        header = f"mepcircuit evolve {now}"
    _write_text(records_csv(stats, table.n, header), cfg["out"])

    summary = {
        "table": table.label or cfg["table"],
        "inputs": table.n,
        "params": {k: v for k, v in cfg.items()
                   if k not in ("out", "summary", "timestamp", "workers")},
        **stats.summary(),
    }
    summary_path = cfg["summary"]
    if summary_path is None and cfg["out"] not in (None, "-"):
        summary_path = os.path.splitext(cfg["out"])[0] + ".summary.json"
    if summary_path:
        _write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", summary_path)

    gates = "-" if stats.min_gates is None else stats.min_gates
    print(f"{stats.successes} out of {stats.runs} runs successful; "
          f"shortest circuit: {gates} gates", file=sys.stderr)
    return EXIT_OK if stats.successes else EXIT_NO_SUCCESS


# --------------------------------------------------------------------------
# verify / export


def _load_netlist(path: str):
    try:
        return parse_netlist(_read_text(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_verify(args) -> int:
    nl = _load_netlist(args.netlist)
    try:
        table = load_table(args.table)
    except ValueError as exc:
        raise UsageError(f"{args.table}: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {args.table}: {exc.strerror}") from None
    try:
        bad = mismatches(nl, table)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not bad:
        print("PASS")
        return EXIT_OK
    print(f"FAIL {len(bad)} mismatching cases: {' '.join(map(str, bad))}")
    return EXIT_NO_SUCCESS


def cmd_export(args) -> int:
    nl = _load_netlist(args.netlist)
    text = export_dot(nl) if args.format == "dot" else format_netlist(nl)
    _write_text(text, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mepcircuit",
        description="Evolve gate-level circuits for subset-sum truth tables with MEP.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-table", help="write a subset-sum truth table")
    p.add_argument("--n", type=int, required=True, help="base set is 1..n")
    p.add_argument("--sum", type=int, required=True, help="target sum k")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen_table)

    p = sub.add_parser("evolve", help="run a seeded batch of evolutions")
    p.add_argument("--config", help="JSON file with option values; flags override it")
    p.add_argument("--paper-instance", type=int, choices=sorted(PAPER_INSTANCES),
                   help="preset n, sum, pop, genes, generations for benchmark rows 1-4")
    p.add_argument("--n", type=int)
    p.add_argument("--sum", type=int)
    p.add_argument("--table", help="truth-table file instead of --n/--sum")
    p.add_argument("--pop", type=int)
    p.add_argument("--genes", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int, help="seed of run 0; run r uses seed + r")
    p.add_argument("--crossover-prob", type=float, help="default 0.9")
    p.add_argument("--mutations", type=int, help="mutation events per offspring (default 5)")
    p.add_argument("--mutation-mode", choices=["exact", "expected"])
    p.add_argument("--p-function", type=float, help="function-gene probability (default 0.5)")
    p.add_argument("--stop-on-success", dest="stop_on_success", action="store_const",
                   const=True, help="stop a run at the first perfect gene (default)")
    p.add_argument("--run-full", dest="stop_on_success", action="store_const", const=False,
                   help="always run every generation")
    p.add_argument("--workers", type=int, help="parallel processes (default: all cores)")
    p.add_argument("--out", help="per-run CSV (default stdout)")
    p.add_argument("--summary", help="JSON summary path (default <out>.summary.json)")
    p.add_argument("--no-timestamp", dest="timestamp", action="store_const", const=False,
                   help="omit the timestamp comment line from the CSV")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", help="check a netlist against a truth table")
    p.add_argument("netlist")
    p.add_argument("table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="render a netlist as DOT or normalized text")
    p.add_argument("netlist")
    p.add_argument("--format", choices=["dot", "text"], default="dot")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
