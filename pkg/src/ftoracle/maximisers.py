"""Maximiser tables: extremal fault sets and their replacement paths.

A key fixes a pair ``(x, y)`` and side conditions on the admissible fault
sets; the entry stores the admissible set ``F*`` maximising ``|xy <> F*|``
together with that path. Every condition here is a per-edge predicate, so the
admissible sets are exactly the subsets (of bounded size) of one allowed edge
set.

Variants (the meaning of ``a`` and ``b`` depends on the variant):

``D``     single edge at distance >= a from x and >= b from y
``D1``    up to f edges, every endpoint at distance >= a from x and >= b from y
``D2xv``  distance >= a from x, and vertex b is y-clean
``D2vy``  vertex a is x-clean, and distance >= b from y
``D3``    vertex a is x-clean and vertex b is y-clean
"""

from __future__ import annotations

import io
import struct
import threading
from collections import Counter, OrderedDict
from dataclasses import dataclass
from typing import NamedTuple

from .graph import INF, Graph
from .pathform import EMPTY, PathForm, pf_from_vertices
from .sp import dijkstra

VARIANTS = ("D", "D1", "D2xv", "D2vy", "D3")


class MaxKey(NamedTuple):
    variant: str
    x: int
    y: int
    a: int
    b: int


@dataclass(frozen=True)
class MaxEntry:
    fstar: tuple[int, ...]
    path: PathForm | object  # PathForm or EMPTY
    value: int | float

    def fault_vertices(self, graph: Graph) -> list[int]:
        return graph.fault_vertices(self.fstar)


class StoreMiss(KeyError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def distance_levels(tables) -> list[int]:
    """Every value ``(xa)_2`` can take: 0, or a power of two between M and 2**levels."""
    lo = tables.M.bit_length() - 1
    return [0] + [1 << k for k in range(lo, tables.levels + 1)]


def _edge_min_dist(tables, x):
    """Per edge, the distance from ``x`` to its nearer endpoint."""
    row = tables.dist[x]
    return [min(row[u], row[v]) for u, v, _ in tables.edges]


def _clean_blocked(tables, root: int, c: int) -> set[int]:
    """Edges whose presence in a fault set stops ``c`` from being ``root``-clean."""
    tree = tables.trees[root]
    blocked = set()
    if not tree.reachable(c):
        return blocked
    tin, tout = tree.euler_in, tree.euler_out
    lo, hi = tin[c], tout[c]
    for eid, (u, v, _) in enumerate(tables.edges):
        if tables.edge_on_path(root, c, eid):
            blocked.add(eid)
        elif (tree.reachable(u) and lo <= tin[u] <= hi) or (tree.reachable(v) and lo <= tin[v] <= hi):
            blocked.add(eid)
    return blocked


class MaximiserSolver:
    """Exact argmax over admissible fault sets by exhaustive search.

    Only sets reachable by repeatedly deleting an allowed edge of the current
    replacement path are explored: any minimum-size maximiser can be built that
    way, since an added edge off the current path leaves the path unchanged.
    Ties on the value go to the smallest set, then the lexicographically
    smallest sorted edge-id tuple.
    """

    def __init__(self, tables, f: int, cache_size: int = 200_000):
        self.tables = tables
        self.f = f
        self.cache_size = cache_size
        self._sp_cache: OrderedDict = OrderedDict()
        self._emin = {}
        self._blocked = {}
        self._memo = {}
        self.counters = Counter()

    # -- admissibility -------------------------------------------------
    def emin(self, x):
        row = self._emin.get(x)
        if row is None:
            row = self._emin[x] = _edge_min_dist(self.tables, x)
        return row

    def blocked(self, root, c):
        key = (root, c)
        out = self._blocked.get(key)
        if out is None:
            out = self._blocked[key] = frozenset(_clean_blocked(self.tables, root, c))
        return out

    def size_limit(self, key: MaxKey) -> int:
        return 1 if key.variant == "D" else self.f

    def allowed(self, key: MaxKey) -> frozenset:
        v, x, y, a, b = key
        m = len(self.tables.edges)
        ok = [True] * m
        if v in ("D", "D1", "D2xv"):
            row = self.emin(x)
            for e in range(m):
                if row[e] < a:
                    ok[e] = False
        if v in ("D", "D1", "D2vy"):
            row = self.emin(y)
            for e in range(m):
                if row[e] < b:
                    ok[e] = False
        if v in ("D2vy", "D3"):
            for e in self.blocked(x, a):
                ok[e] = False
        if v in ("D2xv", "D3"):
            for e in self.blocked(y, b):
                ok[e] = False
        return frozenset(e for e in range(m) if ok[e])

    def condition_holds(self, key: MaxKey, faults) -> bool:
        faults = set(faults)
        if len(faults) > self.size_limit(key):
            return False
        return faults <= self.allowed(key)

    # -- search ----------------------------------------------------------
    def _sp(self, x, banned):
        ck = (x, banned)
        hit = self._sp_cache.get(ck)
        if hit is not None:
            self._sp_cache.move_to_end(ck)
            return hit
        self.counters["dijkstra"] += 1
        dist, parent, pedge = dijkstra(self.tables.gp, x, banned)
        hit = (dist, parent, pedge)
        self._sp_cache[ck] = hit
        if len(self._sp_cache) > self.cache_size:
            self._sp_cache.popitem(last=False)
        return hit

    @staticmethod
    def _path(parent, pedge, x, y):
        verts, eids = [y], []
        v = y
        while v != x:
            eids.append(pedge[v])
            v = parent[v]
            verts.append(v)
        verts.reverse()
        eids.reverse()
        return verts, eids

    def solve(self, key: MaxKey) -> MaxEntry:
        limit = self.size_limit(key)
        allowed = self.allowed(key)
        x, y = key.x, key.y
        mk = (x, y, limit, allowed)
        got = self._memo.get(mk)
        if got is not None:
            return got
        self.counters["solved"] += 1
        empty = frozenset()
        dist0, parent0, pedge0 = self._sp(x, empty)
        best_rank = (-dist0[y], 0, ())
        best_set = empty
        seen = {empty}
        stack = [empty]
        while stack:
            cur = stack.pop()
            dist, parent, pedge = self._sp(x, cur)
            if dist[y] == INF or len(cur) >= limit:
                continue
            _, eids = self._path(parent, pedge, x, y)
            for e in eids:
                if e not in allowed:
                    continue
                nxt = cur | {e}
                if nxt in seen:
                    continue
                seen.add(nxt)
                self.counters["explored"] += 1
                nd = self._sp(x, nxt)[0][y]
                rank = (-nd, len(nxt), tuple(sorted(nxt)))
                if rank < best_rank:
                    best_rank, best_set = rank, nxt
                stack.append(nxt)
        dist, parent, pedge = self._sp(x, best_set)
        if dist[y] == INF:
            path = EMPTY
        else:
            verts, _ = self._path(parent, pedge, x, y)
            path = pf_from_vertices(self.tables, verts)
        entry = MaxEntry(tuple(sorted(best_set)), path, dist[y])
        self._memo[mk] = entry
        return entry


def brute_solve(tables, f: int, key: MaxKey) -> MaxEntry:
    """Reference argmax: every fault set of size <= limit, fresh Dijkstra each."""
    from itertools import combinations

    solver = MaximiserSolver(tables, f)
    limit = solver.size_limit(key)
    m = len(tables.edges)
    best = None
    for k in range(limit + 1):
        for combo in combinations(range(m), k):
            if not solver.condition_holds(key, combo):
                continue
            dist, _, _ = dijkstra(tables.gp, key.x, frozenset(combo))
            rank = (-dist[key.y], k, combo)
            if best is None or rank < best[0]:
                best = (rank, combo)
    combo = best[1]
    dist, parent, pedge = dijkstra(tables.gp, key.x, frozenset(combo))
    if dist[key.y] == INF:
        return MaxEntry(combo, EMPTY, INF)
    verts, _ = MaximiserSolver._path(parent, pedge, key.x, key.y)
    return MaxEntry(combo, pf_from_vertices(tables, verts), dist[key.y])


def cascade_children(graph: Graph, key: MaxKey, entry: MaxEntry) -> tuple[MaxKey, ...]:
    """Keys derived from an entry: two D2 keys per fault vertex of a D1 entry,
    one D3 key per fault vertex of a D2 entry."""
    verts = entry.fault_vertices(graph)
    v, x, y, a, b = key
    if v == "D1":
        out = []
        for c in verts:
            out.append(MaxKey("D2xv", x, y, a, c))
            out.append(MaxKey("D2vy", x, y, c, b))
        return tuple(out)
    if v == "D2xv":
        return tuple(MaxKey("D3", x, y, c, b) for c in verts)
    if v == "D2vy":
        return tuple(MaxKey("D3", x, y, a, c) for c in verts)
    return ()


class MaximiserStore:
    """Keyed maximiser entries behind one lookup, eager (precomputed) or lazy."""

    def __init__(self, tables, f: int, backend: str = "lazy", solver: MaximiserSolver | None = None):
        if backend not in ("eager", "lazy"):
            raise ValueError(f"unknown backend {backend!r}")
        self.tables = tables
        self.f = f
        self.backend = backend
        self.solver = solver or MaximiserSolver(tables, f)
        self.entries: dict[MaxKey, MaxEntry] = {}
        self.children: dict[MaxKey, tuple[MaxKey, ...]] = {}
        self.counters = Counter()
        self.corrupted = False
        self._lock = threading.Lock()

    def lookup(self, key: MaxKey) -> MaxEntry:
        self.counters["lookups"] += 1
        entry = self.entries.get(key)
        if entry is None:
            if self.backend == "eager":
                raise StoreMiss(f"no eager entry for {key}")
            with self._lock:
                entry = self.entries.get(key)
                if entry is None:
                    entry = self.solver.solve(key)
                    self.entries[key] = entry
        if self.corrupted and entry.fstar:
            return MaxEntry(entry.fstar, EMPTY, entry.value)
        return entry

    def variant_counts(self) -> dict[str, int]:
        c = Counter(k.variant for k in self.entries)
        return {v: c.get(v, 0) for v in VARIANTS}

    def _put(self, key):
        if key not in self.entries:
            self.entries[key] = self.solver.solve(key)
            self.counters["entries_built"] += 1
        return self.entries[key]


def build_store_eager(tables, f: int, budget: int | None = 2_000_000) -> MaximiserStore:
    """Precompute every D key and, for ``f >= 2``, every D1 key with its D2/D3 cascade.

    A single-fault oracle answers everything from the D table.
    """
    store = MaximiserStore(tables, f, "eager")
    n = tables.n
    levels = distance_levels(tables)
    cascade = f >= 2
    primary = (2 if cascade else 1) * n * n * len(levels) ** 2
    if budget is not None and primary > budget:
        raise BudgetExceeded(
            f"eager build needs {primary} primary keys (budget {budget}); use the lazy backend"
        )
    graph = tables.graph
    for x in range(n):
        for y in range(n):
            for d1 in levels:
                for d2 in levels:
                    store._put(MaxKey("D", x, y, d1, d2))
                    if not cascade:
                        continue
                    k1 = MaxKey("D1", x, y, d1, d2)
                    e1 = store._put(k1)
                    kids = cascade_children(graph, k1, e1)
                    store.children[k1] = kids
                    for k2 in kids:
                        e2 = store._put(k2)
                        if k2 not in store.children:
                            store.children[k2] = cascade_children(graph, k2, e2)
                            for k3 in store.children[k2]:
                                store._put(k3)
    store.counters.update(store.solver.counters)
    return store


# -- index file ----------------------------------------------------------

MAGIC = b"FTDOIDX\x00"
VERSION = 1
_VARIANT_CODE = {v: i for i, v in enumerate(VARIANTS)}


class IndexFormatError(ValueError):
    pass


def _put_int(buf, value: int):
    if value < 0:
        raise ValueError("negative integers are not encoded")
    raw = value.to_bytes(max(1, (value.bit_length() + 7) // 8), "little")
    buf.write(struct.pack("<H", len(raw)))
    buf.write(raw)


def _get_int(buf) -> int:
    (ln,) = struct.unpack("<H", _read(buf, 2))
    return int.from_bytes(_read(buf, ln), "little")


def _read(buf, k):
    data = buf.read(k)
    if len(data) != k:
        raise IndexFormatError("truncated index")
    return data


def write_index(tables, store: MaximiserStore, seed: int) -> bytes:
    g = tables.graph
    gp = tables.gp
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<H", VERSION))
    buf.write(g.digest())
    buf.write(struct.pack("<qHB", seed, store.f, 0 if store.backend == "eager" else 1))
    buf.write(struct.pack("<III", g.n, g.W, g.m))
    for u, v, w in g.edges:
        buf.write(struct.pack("<III", u, v, w))
    _put_int(buf, gp.M)
    for r in gp.rho:
        _put_int(buf, r)
    entries = sorted(store.entries.items()) if store.backend == "eager" else []
    buf.write(struct.pack("<I", len(entries)))
    for key, entry in entries:
        buf.write(struct.pack("<BII", _VARIANT_CODE[key.variant], key.x, key.y))
        _put_int(buf, key.a)
        _put_int(buf, key.b)
        buf.write(struct.pack("<B", len(entry.fstar)))
        buf.write(struct.pack(f"<{len(entry.fstar)}I", *entry.fstar))
        p = entry.path
        if p is EMPTY:
            buf.write(struct.pack("<BH", 0, 0))
            continue
        buf.write(struct.pack("<BH", 1, p.k))
        for a, b, _ in p.segments:
            buf.write(struct.pack("<II", a, b))
        for link in p.links:
            buf.write(struct.pack("<q", -1 if link is None else link))
    return buf.getvalue()


@dataclass
class IndexData:
    graph: Graph
    M: int
    rho: tuple[int, ...]
    seed: int
    f: int
    backend: str
    raw_entries: list


def read_index(data: bytes, expect_graph: Graph | None = None) -> IndexData:
    buf = io.BytesIO(data)
    if _read(buf, len(MAGIC)) != MAGIC:
        raise IndexFormatError("bad magic")
    (version,) = struct.unpack("<H", _read(buf, 2))
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    digest = _read(buf, 32)
    seed, f, backend = struct.unpack("<qHB", _read(buf, 11))
    n, W, m = struct.unpack("<III", _read(buf, 12))
    edges = tuple(struct.unpack("<III", _read(buf, 12)) for _ in range(m))
    try:
        graph = Graph(n, W, edges)
    except ValueError as exc:
        raise IndexFormatError(f"invalid graph in index: {exc}") from None
    if graph.digest() != digest:
        raise IndexFormatError("graph hash mismatch inside index")
    if expect_graph is not None and expect_graph.digest() != digest:
        raise IndexFormatError("index was built for a different graph")
    M = _get_int(buf)
    rho = tuple(_get_int(buf) for _ in range(m))
    (count,) = struct.unpack("<I", _read(buf, 4))
    raw = []
    for _ in range(count):
        code, x, y = struct.unpack("<BII", _read(buf, 9))
        a, b = _get_int(buf), _get_int(buf)
        (nf,) = struct.unpack("<B", _read(buf, 1))
        fstar = struct.unpack(f"<{nf}I", _read(buf, 4 * nf))
        present, k = struct.unpack("<BH", _read(buf, 3))
        segs, links = None, None
        if present:
            segs = [struct.unpack("<II", _read(buf, 8)) for _ in range(k)]
            links = [struct.unpack("<q", _read(buf, 8))[0] for _ in range(k - 1)]
            links = [None if lk < 0 else lk for lk in links]
        raw.append((MaxKey(VARIANTS[code], x, y, a, b), tuple(fstar), segs, links))
    if buf.read(1):
        raise IndexFormatError("trailing bytes in index")
    return IndexData(graph, M, rho, seed, f, "eager" if backend == 0 else "lazy", raw)


def restore_store(tables, data: IndexData) -> MaximiserStore:
    from .pathform import make_pathform

    store = MaximiserStore(tables, data.f, data.backend)
    for key, fstar, segs, links in data.raw_entries:
        if segs is None:
            entry = MaxEntry(fstar, EMPTY, INF)
        else:
            p = make_pathform(tables, segs, links)
            entry = MaxEntry(fstar, p, p.weight)
        store.entries[key] = entry
    for key, entry in store.entries.items():
        if key.variant in ("D1", "D2xv", "D2vy"):
            store.children[key] = cascade_children(tables.graph, key, entry)
    return store
