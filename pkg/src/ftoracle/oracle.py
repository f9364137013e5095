"""Query layer of the fault-tolerant distance oracle.

A query for ``st <> F`` finds the paths ``P_1 .. P_k`` that successive faults
knock out, walks jump sequences along each, and for every pair ``(x, y)`` of
jump vertices either recognises an intermediate vertex (and splits the query
there) or consults the maximiser cascade, which yields the replacement path
itself or a small set of candidate intermediate vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .graph import INF, Graph, PerturbedGraph, perturb_weights
from .jump import JumpSequence, find_jump, pow2_floor
from .maximisers import (
    MaximiserStore,
    MaxKey,
    build_store_eager,
    read_index,
    restore_store,
    write_index,
)
from .pathform import (
    EMPTY,
    pf_avoids,
    pf_better,
    pf_canonical,
    pf_concat,
    pf_contains_edge,
    pf_from_edges,
    pf_segment,
    pf_weight,
)
from .sp import SPTables, UniquenessViolation, in_subtree, tree_path_intact

MAX_RESEEDS = 16


@dataclass(frozen=True)
class OracleConfig:
    """Build and query knobs.

    ``short_detours`` and ``recurse_spare`` close gaps in the cascade's
    guarantees: a pair whose ``xy`` path is intact or whose detour is one edge,
    and hit vertices that fail every cleanliness test. Turning both off gives
    the bare cascade.
    """

    backend: str = "lazy"
    budget: int | None = 2_000_000
    spread_bits: int = 32
    max_reseeds: int = MAX_RESEEDS
    short_detours: bool = True
    recurse_spare: bool = True


class UniquenessExhausted(RuntimeError):
    pass


def is_intermediate(tables, z: int, s: int, t: int, faults) -> bool:
    """Both shortest paths ``sz`` and ``zt`` contain a fault."""
    return not tree_path_intact(tables, s, z, faults) and not tree_path_intact(tables, z, t, faults)


def is_clean(tables, x: int, u: int, faults, fault_vertices=None) -> bool:
    """``xu`` avoids the faults and no fault endpoint hangs below ``u`` in ``T_x``."""
    if tables.dist[x][u] == INF:
        return False
    if not tree_path_intact(tables, x, u, faults):
        return False
    if fault_vertices is None:
        fault_vertices = tables.graph.fault_vertices(faults)
    tree = tables.trees[x]
    return not any(tree.reachable(a) and in_subtree(tables, x, u, a) for a in fault_vertices)


@dataclass
class QueryStats:
    lookups: int = 0
    depth: int = 0
    fi1_calls: int = 0
    max_fi1_per_level: int = 0
    max_set: dict = field(default_factory=lambda: {"fi1": 0, "fi2": 0, "fi3": 0})
    max_jump: int = 0
    jump_lengths: list = field(default_factory=list)
    query_calls: int = 0
    max_spare: int = 0

    def as_dict(self) -> dict:
        return {
            "lookups": self.lookups,
            "depth": self.depth,
            "fi1_calls": self.fi1_calls,
            "max_fi1_per_level": self.max_fi1_per_level,
            "max_set_fi1": self.max_set["fi1"],
            "max_set_fi2": self.max_set["fi2"],
            "max_set_fi3": self.max_set["fi3"],
            "max_jump": self.max_jump,
            "query_calls": self.query_calls,
            "max_spare": self.max_spare,
        }


@dataclass
class QueryResult:
    path: object  # PathForm or EMPTY
    weight: int | float
    base_weight: int | None
    stats: QueryStats


class QueryContext:
    """Scratch state of one top-level query: fault set, memo tables, counters."""

    def __init__(self, oracle: "FaultTolerantOracle", faults):
        self.oracle = oracle
        self.tables = oracle.tables
        self.faults = tuple(sorted(set(faults)))
        self.fault_set = frozenset(self.faults)
        self.fault_vertices = self.tables.graph.fault_vertices(self.faults)
        self.stats = QueryStats()
        self._memo = {}
        self._fi1 = {}
        self._sub = {}
        self._ctxs = {}

    def lookup(self, key: MaxKey):
        self.stats.lookups += 1
        return self.oracle.store.lookup(key)

    def nearest(self, x: int):
        """``(x a)_2`` for the nearest fault endpoint ``a``."""
        row = self.tables.dist[x]
        d = min((row[a] for a in self.fault_vertices), default=INF)
        # every reachable vertex is nearer than 2**levels, so the cap keeps F admissible
        return 1 << self.tables.levels if d == INF else pow2_floor(d)

    def clean(self, x, u):
        return is_clean(self.tables, x, u, self.faults, self.fault_vertices)

    def inter(self, z, a, b):
        return is_intermediate(self.tables, z, a, b, self.faults)

    def avoids(self, p):
        return p is not EMPTY and pf_avoids(self.tables, p, self.faults)

    def jumps(self, p, reverse, fault_vertices=None, nfaults=None) -> JumpSequence:
        if fault_vertices is None:
            fault_vertices, nfaults = self.fault_vertices, len(self.faults)
        seq = find_jump(self.tables, p, fault_vertices, reverse)
        self.stats.jump_lengths.append((nfaults, len(seq)))
        self.stats.max_jump = max(self.stats.max_jump, len(seq))
        return seq


class FaultTolerantOracle:
    """Answers ``st <> F`` for ``|F| <= f`` from the shortest-path tables and a maximiser store."""

    def __init__(self, tables: SPTables, store: MaximiserStore, seed: int, config: OracleConfig | None = None):
        self.tables = tables
        self.store = store
        self.seed = seed
        self.f = store.f
        self.config = config or OracleConfig(backend=store.backend)

    @property
    def graph(self) -> Graph:
        return self.tables.graph

    @classmethod
    def build(cls, graph: Graph, f: int, seed: int = 0, config: OracleConfig | None = None, **overrides):
        """Perturb, build tables and the store; reseed (``seed + 1``, ...) on a detected tie."""
        config = config or OracleConfig()
        if overrides:
            config = replace(config, **overrides)
        if f < 1:
            raise ValueError("f must be at least 1")
        last = None
        for attempt in range(config.max_reseeds):
            s = seed + attempt
            try:
                tables = SPTables(perturb_weights(graph, s, config.spread_bits))
                if config.backend == "eager":
                    store = build_store_eager(tables, f, config.budget)
                else:
                    store = MaximiserStore(tables, f, "lazy")
                return cls(tables, store, s, config)
            except UniquenessViolation as exc:
                last = exc
        raise UniquenessExhausted(f"ties persisted after {config.max_reseeds} reseeds: {last}")

    def to_bytes(self) -> bytes:
        return write_index(self.tables, self.store, self.seed)

    @classmethod
    def from_bytes(cls, data: bytes, expect_graph: Graph | None = None, config: OracleConfig | None = None):
        idx = read_index(data, expect_graph)
        gp = PerturbedGraph(idx.graph, idx.M, idx.rho, idx.seed)
        tables = SPTables(gp)
        store = restore_store(tables, idx)
        config = replace(config or OracleConfig(), backend=store.backend)
        return cls(tables, store, idx.seed, config)

    # -- public entry point ------------------------------------------------
    def query(self, s: int, t: int, faults=()) -> QueryResult:
        n = self.tables.n
        if not (0 <= s < n and 0 <= t < n):
            raise ValueError(f"vertex out of range [0, {n})")
        faults = set(faults)
        if len(faults) > self.f:
            raise ValueError(f"{len(faults)} faults exceed the oracle's f={self.f}")
        for e in faults:
            if not 0 <= e < self.graph.m:
                raise ValueError(f"unknown edge id {e}")
        ctx = QueryContext(self, faults)
        path = self._answer(ctx, s, t, ctx.faults)
        path = pf_canonical(self.tables, path)
        w = pf_weight(path)
        return QueryResult(path, w, self.tables.recover(w), ctx.stats)

    def query_single(self, s: int, t: int, e: int) -> QueryResult:
        ctx = QueryContext(self, (e,))
        path = pf_canonical(self.tables, self._single(ctx, s, t, e))
        w = pf_weight(path)
        return QueryResult(path, w, self.tables.recover(w), ctx.stats)

    # -- dispatch by fault count -------------------------------------------
    def _answer(self, ctx: QueryContext, s, t, faults):
        """``st <> faults`` for a subset of the query's faults (memoized)."""
        faults = tuple(sorted(faults))
        key = (s, t, faults)
        hit = ctx._sub.get(key)
        if hit is not None:
            return hit
        if not faults:
            out = pf_segment(self.tables, s, t)
        elif len(faults) == 1:
            out = self._single(ctx, s, t, faults[0])
        else:
            sub = ctx if faults == ctx.faults else ctx._ctxs.get(faults)
            if sub is None:
                sub = QueryContext(self, faults)
                sub.stats = ctx.stats
                sub._sub = ctx._sub
                sub._ctxs = ctx._ctxs
                ctx._ctxs[faults] = sub
            out = self._query(sub, s, t, len(faults) + 1, 1)
        ctx._sub[key] = out
        return out

    # -- one fault -----------------------------------------------------------
    def _single(self, ctx: QueryContext, s, t, e):
        tables = self.tables
        st = pf_segment(tables, s, t)
        if st is EMPTY or not tables.edge_on_path(s, t, e):
            return st
        u, v, _ = tables.edges[e]
        if tables.dist[s][u] > tables.dist[s][v]:
            u, v = v, u
        fwd = ctx.jumps(st, False, (u, v), 1)
        rev = ctx.jumps(st, True, (u, v), 1)
        best = EMPTY
        for x in fwd:
            for y in rev:
                d1 = pow2_floor(tables.dist[x][u])
                d2 = pow2_floor(tables.dist[y][v])
                entry = ctx.lookup(MaxKey("D", x, y, d1, d2))
                if entry.path is EMPTY:
                    continue
                cand = pf_concat(tables, pf_concat(tables, pf_segment(tables, s, x), entry.path), pf_segment(tables, y, t))
                if not pf_contains_edge(tables, cand, e):
                    best = pf_better(tables, best, cand)
        return best

    # -- several faults --------------------------------------------------------
    def _find_paths(self, ctx: QueryContext, s, t):
        """``P_1 .. P_k`` or ``(None, answer)`` when some ``P_i`` already avoids every fault."""
        tables = self.tables
        chosen: list[int] = []
        paths = []
        for _ in range(len(ctx.faults)):
            p = self._answer(ctx, s, t, chosen)
            if p is EMPTY:
                return None, EMPTY
            paths.append(p)
            hit = None
            for e in ctx.faults:
                if e in chosen:
                    continue
                a, b, _ = tables.edges[e]
                w = tables.pweight[e]
                r1a = pf_weight(self._answer(ctx, s, a, chosen))
                r2b = pf_weight(self._answer(ctx, b, t, chosen))
                r1b = pf_weight(self._answer(ctx, s, b, chosen))
                r2a = pf_weight(self._answer(ctx, a, t, chosen))
                if min(r1a + w + r2b, r1b + w + r2a) == p.weight:
                    hit = e
                    break
            if hit is None:
                return None, p
            chosen.append(hit)
        return paths, None

    def _query(self, ctx: QueryContext, s, t, r, depth):
        if r == 0:
            return EMPTY
        key = (s, t, r)
        if key in ctx._memo:
            return ctx._memo[key]
        ctx.stats.query_calls += 1
        ctx.stats.depth = max(ctx.stats.depth, depth)
        tables = self.tables
        paths, early = self._find_paths(ctx, s, t)
        if paths is None:
            ctx._memo[key] = early
            return early
        fwd = [ctx.jumps(p, False) for p in paths]
        rev = [ctx.jumps(p, True) for p in paths]
        best = EMPTY
        fi1_here = 0
        for i in range(len(paths)):
            for j in range(len(paths)):
                inter = set()
                spare = set()
                for x in fwd[i]:
                    for y in rev[j]:
                        if ctx.inter(x, s, t):
                            inter.add(x)
                        elif ctx.inter(y, s, t):
                            inter.add(y)
                        else:
                            fi1_here += 1
                            p, found, extra = self._fi1(ctx, x, y)
                            inter |= found
                            spare |= extra
                            if p is EMPTY:
                                continue
                            sx = pf_segment(tables, s, x)
                            yt = pf_segment(tables, y, t)
                            cand = pf_concat(tables, pf_concat(tables, sx, p), yt)
                            # sx and yt are usually intact here, but not for every pair
                            if ctx.avoids(cand):
                                best = pf_better(tables, best, cand)
                if self.config.recurse_spare:
                    spare -= inter | {s, t}
                    ctx.stats.max_spare = max(ctx.stats.max_spare, len(spare))
                    inter |= spare
                for u in sorted(inter):
                    left = self._query(ctx, s, u, r - 1, depth + 1)
                    if left is EMPTY:
                        continue
                    right = self._query(ctx, u, t, r - 1, depth + 1)
                    if right is EMPTY:
                        continue
                    best = pf_better(tables, best, pf_concat(tables, left, right))
        ctx.stats.fi1_calls += fi1_here
        ctx.stats.max_fi1_per_level = max(ctx.stats.max_fi1_per_level, fi1_here)
        ctx._memo[key] = best
        return best

    def _note_set(self, ctx, level, size):
        if size > ctx.stats.max_set[level]:
            ctx.stats.max_set[level] = size

    def _fi1(self, ctx: QueryContext, x, y):
        """``(path, intermediate candidates, spare vertices)`` for the pair ``(x, y)``.

        Spare vertices are fault endpoints of consulted maximisers that passed
        no test; whenever a maximiser's set hits ``xy <> F`` one of its
        endpoints lies on that path, so they are recursed on as well.
        """
        key = (x, y)
        hit = ctx._fi1.get(key)
        if hit is not None:
            return hit
        if self.config.short_detours and tree_path_intact(self.tables, x, y, ctx.faults):
            # no detour between x and y: the shortest path is the answer
            ctx._fi1[key] = (pf_segment(self.tables, x, y), frozenset(), frozenset())
            return ctx._fi1[key]
        entry = ctx.lookup(MaxKey("D1", x, y, ctx.nearest(x), ctx.nearest(y)))
        path = entry.path if ctx.avoids(entry.path) else EMPTY
        link = self.graph.edge_id(x, y) if self.config.short_detours else None
        if link is not None and link not in ctx.fault_set:
            # a one-edge detour can only be hit through its own endpoints
            path = pf_better(self.tables, path, pf_from_edges(self.tables, [x, y]))
        inter = set()
        spare = set()
        for u in entry.fault_vertices(self.graph):
            if ctx.clean(x, u):
                p, found, extra = self._fi2(ctx, x, y, u, None)
                path = pf_better(self.tables, path, p)
                inter |= found
                spare |= extra
            if ctx.clean(y, u):
                p, found, extra = self._fi2(ctx, x, y, None, u)
                path = pf_better(self.tables, path, p)
                inter |= found
                spare |= extra
            if ctx.inter(u, x, y):
                inter.add(u)
            spare.add(u)
        spare -= inter | {x, y}
        self._note_set(ctx, "fi1", len(inter))
        ctx._fi1[key] = (path, frozenset(inter), frozenset(spare))
        return ctx._fi1[key]

    def _fi2(self, ctx: QueryContext, x, y, u, v):
        if v is not None:
            entry = ctx.lookup(MaxKey("D2xv", x, y, ctx.nearest(x), v))
        else:
            entry = ctx.lookup(MaxKey("D2vy", x, y, u, ctx.nearest(y)))
        path = entry.path if ctx.avoids(entry.path) else EMPTY
        inter = set()
        spare = set()
        for z in entry.fault_vertices(self.graph):
            if v is not None and ctx.clean(x, z):
                p, found, extra = self._fi3(ctx, x, y, z, v)
            elif u is not None and ctx.clean(y, z):
                p, found, extra = self._fi3(ctx, x, y, u, z)
            else:
                p, found, extra = EMPTY, (), ()
            path = pf_better(self.tables, path, p)
            inter.update(found)
            spare.update(extra)
            if ctx.inter(z, x, y):
                inter.add(z)
            spare.add(z)
        self._note_set(ctx, "fi2", len(inter))
        return path, inter, spare

    def _fi3(self, ctx: QueryContext, x, y, u, v):
        entry = ctx.lookup(MaxKey("D3", x, y, u, v))
        path = entry.path if ctx.avoids(entry.path) else EMPTY
        verts = entry.fault_vertices(self.graph)
        inter = {z for z in verts if ctx.inter(z, x, y)}
        self._note_set(ctx, "fi3", len(inter))
        return path, inter, set(verts)


def set_size_bounds(f: int) -> dict:
    return {"fi1": 8 * f**3, "fi2": 4 * f**2, "fi3": 2 * f}


def fi1_call_bound(tables, f: int) -> int:
    return 4 * 256 * f * f * tables.levels**2
