"""Mean store lookups, recursive calls and query time per fault budget on one graph.

Usage: python scripts/bench_trend.py [--n 20] [--m 36] [--W 8] [--trials 100] [--fmax 3]
"""

import argparse
import time
from statistics import fmean

from ftoracle.graph import generate_random_graph
from ftoracle.harness import sample_queries
from ftoracle.oracle import FaultTolerantOracle


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--m", type=int, default=36)
    ap.add_argument("--W", type=int, default=8)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--fmax", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    g = generate_random_graph(args.n, args.m, args.W, args.seed)
    print("f,lookups,query_calls,fi1_calls,max_jump,warm_query_ms")
    for f in range(1, args.fmax + 1):
        o = FaultTolerantOracle.build(g, f, args.seed)
        qs = sample_queries(o.tables, args.trials, f, f, min_faults=f)
        for s, t, F in qs:  # warm the lazy store so timings exclude solving
            o.query(s, t, F)
        stats, times = [], []
        for s, t, F in qs:
            t0 = time.perf_counter()
            stats.append(o.query(s, t, F).stats)
            times.append(1000 * (time.perf_counter() - t0))
        print(
            f"{f},{fmean(s.lookups for s in stats):.1f},{fmean(s.query_calls for s in stats):.1f},"
            f"{fmean(s.fi1_calls for s in stats):.1f},{max(s.max_jump for s in stats)},{fmean(times):.2f}"
        )


if __name__ == "__main__":
    main()
