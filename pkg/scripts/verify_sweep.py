"""Mismatch rates of the multi-fault query under each repair setting.

Usage: python scripts/verify_sweep.py [--f 2] [--graphs 100] [--trials 30] [--nmax 30]
"""

import argparse
import random
import time

from ftoracle.graph import generate_random_graph
from ftoracle.harness import run_verify, sample_queries
from ftoracle.oracle import FaultTolerantOracle

SETTINGS = {
    "bare": dict(short_detours=False, recurse_spare=False),
    "short_detours": dict(recurse_spare=False),
    "recurse_spare": dict(short_detours=False),
    "both": {},
}


def sweep(f, graphs, trials, nmax, overrides):
    bad, total, first = 0, 0, []
    for gs in range(graphs):
        rng = random.Random(1000 + gs)
        n = rng.randint(8, nmax)
        m = min(n * (n - 1) // 2, rng.randint(n + 2, 2 * n))
        g = generate_random_graph(n, m, rng.choice((1, 4, 8)), gs)
        o = FaultTolerantOracle.build(g, f, gs, **overrides)
        rep = run_verify(o, 0, 0, queries=sample_queries(o.tables, trials, gs, f, min_faults=f))
        total += rep.trials
        bad += len(rep.mismatches)
        first += [(n, m, g.W, gs, x["s"], x["t"], x["faults"]) for x in rep.mismatches[:1]]
    return bad, total, first


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f", type=int, default=2)
    ap.add_argument("--graphs", type=int, default=100)
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--nmax", type=int, default=30)
    ap.add_argument("--only", choices=list(SETTINGS))
    args = ap.parse_args()
    for name, overrides in SETTINGS.items():
        if args.only and name != args.only:
            continue
        t0 = time.perf_counter()
        bad, total, first = sweep(args.f, args.graphs, args.trials, args.nmax, overrides)
        print(f"{name:14s} f={args.f} mismatches {bad}/{total} ({time.perf_counter() - t0:.0f}s)")
        for case in first[:3]:
            print("  n m W seed s t F:", *case)


if __name__ == "__main__":
    main()
