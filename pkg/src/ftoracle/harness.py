"""Randomised and exhaustive comparison of the oracle against fresh Dijkstra runs."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field

from .graph import INF, dump_graph
from .jump import jump_bound, single_fault_jump_bound
from .oracle import FaultTolerantOracle, fi1_call_bound, set_size_bounds
from .pathform import EMPTY, pf_expand, pf_from_edges, pf_validate, pf_weight
from .sp import _walk, brute_replacement_path, dijkstra_avoiding


def adaptive_faults(tables, s: int, t: int, k: int, rng: random.Random, uniform_share: float = 0.25) -> list[int]:
    """Up to ``k`` faults, each usually drawn from the current replacement path.

    Faults off the path rarely change the answer, so uniform draws are mixed in
    at rate ``uniform_share`` only to exercise the early-exit branches.
    """
    faults: list[int] = []
    m = len(tables.edges)
    for _ in range(k):
        if rng.random() < uniform_share:
            choices = [e for e in range(m) if e not in faults]
        else:
            p = brute_replacement_path(tables, s, t, faults)
            choices = [] if p is EMPTY else list(p.links)
        if not choices:
            break
        faults.append(rng.choice(choices))
    return faults


def compare(oracle: FaultTolerantOracle, s: int, t: int, faults, ref=None) -> tuple[dict | None, object, float]:
    """Query once and diff against the brute oracle; returns ``(mismatch, result, brute_seconds)``.

    A precomputed brute answer may be passed as ``ref``.
    """
    tables = oracle.tables
    res = oracle.query(s, t, faults)
    brute_s = 0.0
    if ref is None:
        t0 = time.perf_counter()
        ref = brute_replacement_path(tables, s, t, faults)
        brute_s = time.perf_counter() - t0
    problem = None
    if pf_weight(ref) != res.weight:
        problem = "weight"
    elif ref is not EMPTY:
        try:
            if pf_expand(tables, res.path) != pf_expand(tables, ref):
                problem = "path"
        except ValueError as exc:
            problem = f"expansion: {exc}"
    if problem is None:
        return None, res, brute_s
    g = tables.graph
    return (
        {
            "kind": problem,
            "seed": oracle.seed,
            "graph": dump_graph(g),
            "s": s,
            "t": t,
            "faults": [list(g.endpoints(e)) for e in faults],
            "expected": tables.recover(pf_weight(ref)),
            "got": res.base_weight,
        },
        res,
        brute_s,
    )


@dataclass
class VerifyReport:
    trials: int = 0
    mismatches: list = field(default_factory=list)
    decomposability_violations: list = field(default_factory=list)
    jump_max: int = 0
    jump_bound: int = 0
    jump_max_single: int = 0
    jump_bound_single: int = 0
    jump_sequences: int = 0
    jump_violations: int = 0
    set_max: dict = field(default_factory=lambda: {"fi1": 0, "fi2": 0, "fi3": 0})
    set_bounds: dict = field(default_factory=dict)
    fi1_per_level_max: int = 0
    fi1_per_level_bound: int = 0
    spare_max: int = 0
    store_counts: dict = field(default_factory=dict)
    build_seconds: float = 0.0
    query_seconds: float = 0.0
    brute_seconds: float = 0.0

    @property
    def bounds_ok(self) -> bool:
        return (
            self.jump_violations == 0
            and all(self.set_max[k] <= self.set_bounds.get(k, self.set_max[k]) for k in self.set_max)
            and self.fi1_per_level_max <= self.fi1_per_level_bound
        )

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.decomposability_violations and self.bounds_ok

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bounds_ok"] = self.bounds_ok
        out["passed"] = self.passed
        return out

    def absorb(self, oracle: FaultTolerantOracle, faults, res, mismatch, q_s, b_s):
        tables = oracle.tables
        self.trials += 1
        self.query_seconds += q_s
        self.brute_seconds += b_s
        if mismatch is not None:
            self.mismatches.append(mismatch)
        err = pf_validate(tables, res.path, len(faults) + 1)
        if err is not None:
            self.decomposability_violations.append({"faults": list(faults), "error": err})
        st = res.stats
        for k, length in st.jump_lengths:
            self.jump_sequences += 1
            bound = single_fault_jump_bound(tables) if k == 1 else jump_bound(tables, k)
            if length > bound:
                self.jump_violations += 1
            if k == 1:
                self.jump_max_single = max(self.jump_max_single, length)
            self.jump_max = max(self.jump_max, length)
        for key in self.set_max:
            self.set_max[key] = max(self.set_max[key], st.max_set[key])
        self.fi1_per_level_max = max(self.fi1_per_level_max, st.max_fi1_per_level)
        self.spare_max = max(self.spare_max, st.max_spare)


def _exhaustive_single(tables, rep: VerifyReport):
    """Every ``(s, t, e)`` with its brute answer; one Dijkstra serves all targets."""
    n, m = tables.n, len(tables.edges)
    for s in range(n):
        for e in range(m):
            t0 = time.perf_counter()
            dist, parent = dijkstra_avoiding(tables.gp, s, (e,))
            rep.brute_seconds += time.perf_counter() - t0
            for t in range(n):
                ref = EMPTY if dist[t] == INF else pf_from_edges(tables, _walk(parent, s, t))
                yield s, t, [e], ref


def sample_queries(tables, trials: int, seed: int, max_faults: int, min_faults: int = 1) -> list:
    """``(s, t, faults)`` triples with ``min_faults <= k <= max_faults`` adaptive faults each."""
    rng = random.Random(seed)
    n = tables.n
    out = []
    for _ in range(trials):
        s, t = rng.sample(range(n), 2) if n > 1 else (0, 0)
        k = rng.randint(min_faults, max_faults)
        out.append((s, t, adaptive_faults(tables, s, t, k, rng)))
    return out


def run_verify(
    oracle: FaultTolerantOracle,
    trials: int,
    seed: int,
    exhaustive: bool = False,
    max_faults: int | None = None,
    queries=None,
) -> VerifyReport:
    """Compare the oracle with the brute oracle on sampled, given or exhaustive queries.

    Exhaustive mode covers every ``(s, t, e)`` triple with a single fault.
    """
    tables = oracle.tables
    f = oracle.f if max_faults is None else max_faults
    rep = VerifyReport(
        jump_bound=jump_bound(tables, f),
        jump_bound_single=single_fault_jump_bound(tables),
        set_bounds=set_size_bounds(oracle.f),
        fi1_per_level_bound=fi1_call_bound(tables, oracle.f),
    )
    if exhaustive:
        work = _exhaustive_single(tables, rep)
    else:
        if queries is None:
            queries = sample_queries(tables, trials, seed, f)
        work = ((s, t, faults, None) for s, t, faults in queries)
    for s, t, faults, ref in work:
        t0 = time.perf_counter()
        mismatch, res, b_s = compare(oracle, s, t, faults, ref)
        q_s = time.perf_counter() - t0 - b_s
        rep.absorb(oracle, faults, res, mismatch, q_s, b_s)
    rep.store_counts = oracle.store.variant_counts()
    return rep
