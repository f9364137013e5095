"""Command-line entry point: build, query, verify, bench."""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from pathlib import Path

from .graph import GraphFormatError, generate_random_graph, load_graph
from .harness import adaptive_faults, run_verify
from .maximisers import BudgetExceeded, IndexFormatError, StoreMiss
from .oracle import FaultTolerantOracle, OracleConfig, UniquenessExhausted
from .pathform import pf_to_json
from .sp import brute_replacement_path

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_MISMATCH = 3
EXIT_BUDGET = 4

BENCH_FIELDS = [
    "trial", "n", "m", "f", "k", "s", "t", "base_weight",
    "query_ms", "brute_ms", "lookups", "depth", "fi1_calls", "query_calls", "max_jump",
]


class QueryParseError(ValueError):
    pass


def parse_query_line(line: str, lineno: int):
    parts = line.split()
    if parts[0] != "q":
        raise QueryParseError(f"line {lineno}: expected 'q', got {parts[0]!r}")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError:
        raise QueryParseError(f"line {lineno}: non-integer field") from None
    if len(nums) < 3:
        raise QueryParseError(f"line {lineno}: need 'q <s> <t> <k> ...'")
    s, t, k = nums[:3]
    pairs = nums[3:]
    if k < 0 or len(pairs) != 2 * k:
        raise QueryParseError(f"line {lineno}: k={k} needs {2 * k} endpoint fields, got {len(pairs)}")
    return s, t, [(pairs[2 * i], pairs[2 * i + 1]) for i in range(k)]


def parse_query_file(text: str):
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        out.append((lineno, *parse_query_line(stripped, lineno)))
    return out


def _random_spec(spec: str):
    try:
        n, m, W = (int(x) for x in spec.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected n,m,W") from None
    return n, m, W


def _load_graph_arg(args):
    if args.graph:
        return load_graph(Path(args.graph).read_text())
    n, m, W = args.random
    return generate_random_graph(n, m, W, args.seed)


def cmd_build(args) -> int:
    graph = load_graph(Path(args.graph).read_text())
    config = OracleConfig(backend="lazy" if args.lazy else "eager", budget=args.budget)
    oracle = FaultTolerantOracle.build(graph, args.f, args.seed, config)
    Path(args.out).write_bytes(oracle.to_bytes())
    counts = oracle.store.variant_counts()
    print(f"backend {oracle.store.backend} seed {oracle.seed} f {oracle.f}")
    for variant, c in counts.items():
        print(f"{variant} {c}")
    return EXIT_OK


def query_record(oracle: FaultTolerantOracle, lineno: int, s: int, t: int, pairs, expand: bool) -> dict:
    g = oracle.graph
    rec = {"line": lineno, "s": s, "t": t, "faults": [list(p) for p in pairs]}
    ids = []
    for u, v in pairs:
        eid = g.edge_id(u, v) if 0 <= u < g.n and 0 <= v < g.n else None
        if eid is None:
            rec["error"] = f"unknown edge ({u}, {v})"
            return rec
        ids.append(eid)
    try:
        res = oracle.query(s, t, ids)
    except (ValueError, StoreMiss) as exc:
        rec["error"] = str(exc)
        return rec
    rec.update(pf_to_json(oracle.tables, res.path, expand))
    rec["stats"] = res.stats.as_dict()
    return rec


def cmd_query(args) -> int:
    oracle = FaultTolerantOracle.from_bytes(Path(args.index).read_bytes())
    records = parse_query_file(Path(args.queries).read_text())
    for lineno, s, t, pairs in records:
        print(json.dumps(query_record(oracle, lineno, s, t, pairs, args.expand)))
    return EXIT_OK


def cmd_verify(args) -> int:
    graph = _load_graph_arg(args)
    config = OracleConfig(backend="eager" if args.eager else "lazy", budget=args.budget)
    t0 = time.perf_counter()
    oracle = FaultTolerantOracle.build(graph, args.f, args.seed, config)
    build_s = time.perf_counter() - t0
    if args.corrupt:
        oracle.store.corrupted = True
    report = run_verify(oracle, args.trials, args.seed, exhaustive=args.exhaustive)
    report.build_seconds = build_s
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_bench(args) -> int:
    graph = _load_graph_arg(args)
    config = OracleConfig(backend="eager" if args.eager else "lazy", budget=args.budget)
    oracle = FaultTolerantOracle.build(graph, args.f, args.seed, config)
    tables = oracle.tables
    rng = random.Random(args.seed)
    writer = csv.DictWriter(sys.stdout, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for trial in range(args.trials):
        s, t = rng.sample(range(graph.n), 2)
        faults = adaptive_faults(tables, s, t, args.f, rng)
        t0 = time.perf_counter()
        res = oracle.query(s, t, faults)
        q = time.perf_counter() - t0
        t0 = time.perf_counter()
        brute_replacement_path(tables, s, t, faults)
        b = time.perf_counter() - t0
        st = res.stats
        writer.writerow({
            "trial": trial, "n": graph.n, "m": graph.m, "f": args.f, "k": len(faults), "s": s, "t": t,
            "base_weight": "" if res.base_weight is None else res.base_weight,
            "query_ms": f"{q * 1e3:.3f}", "brute_ms": f"{b * 1e3:.3f}",
            "lookups": st.lookups, "depth": st.depth, "fi1_calls": st.fi1_calls,
            "query_calls": st.query_calls, "max_jump": st.max_jump,
        })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ftoracle", description="Exact shortest paths under edge failures.")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="build and serialize an index")
    b.add_argument("-g", "--graph", required=True)
    b.add_argument("-f", type=int, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--lazy", action="store_true", help="solve maximisers on demand instead of precomputing")
    b.add_argument("--budget", type=int, default=2_000_000, help="max primary keys for an eager build")
    b.add_argument("-o", "--out", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="answer a batch of queries as JSON lines")
    q.add_argument("-i", "--index", required=True)
    q.add_argument("-q", "--queries", required=True)
    q.add_argument("--expand", action="store_true", help="include the explicit vertex sequence")
    q.set_defaults(func=cmd_query)

    for name, func, help_ in (
        ("verify", cmd_verify, "compare against fresh Dijkstra runs"),
        ("bench", cmd_bench, "per-query timings and counters as CSV"),
    ):
        v = sub.add_parser(name, help=help_)
        src = v.add_mutually_exclusive_group(required=True)
        src.add_argument("-g", "--graph")
        src.add_argument("--random", type=_random_spec, metavar="n,m,W")
        v.add_argument("-f", type=int, required=True)
        v.add_argument("--trials", type=int, default=100)
        v.add_argument("--seed", type=int, default=0)
        v.add_argument("--eager", action="store_true")
        v.add_argument("--budget", type=int, default=2_000_000)
        if name == "verify":
            v.add_argument("--exhaustive", action="store_true", help="every (s, t, e) triple")
            v.add_argument("--corrupt", action="store_true", help="blank stored paths (fault injection)")
        v.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphFormatError, QueryParseError, IndexFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except UniquenessExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
