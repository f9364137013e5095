"""Undirected integer-weighted graphs, their text format, and weight perturbation.

Edges are stored canonically as ``(u, v, w)`` with ``u < v`` and sorted by
``(u, v)``; an edge id is the index into that list.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

INF = float("inf")


class GraphFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    n: int
    W: int
    edges: tuple[tuple[int, int, int], ...]
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        seen = {}
        for eid, (u, v, w) in enumerate(self.edges):
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge {eid} ({u}, {v}) is not canonical")
            if not 1 <= w <= self.W:
                raise ValueError(f"edge {eid} weight {w} outside [1, {self.W}]")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen[(u, v)] = eid
        if list(self.edges) != sorted(self.edges):
            raise ValueError("edges must be sorted by (u, v)")
        object.__setattr__(self, "_index", seen)

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int | None:
        if u > v:
            u, v = v, u
        return self._index.get((u, v))

    def endpoints(self, eid: int) -> tuple[int, int]:
        u, v, _ = self.edges[eid]
        return u, v

    def fault_vertices(self, fault_ids) -> list[int]:
        out = set()
        for eid in fault_ids:
            u, v, _ = self.edges[eid]
            out.add(u)
            out.add(v)
        return sorted(out)

    def digest(self) -> bytes:
        return hashlib.sha256(dump_graph(self).encode()).digest()


def make_graph(n: int, W: int, edges) -> Graph:
    """Build a Graph from arbitrary-orientation ``(u, v, w)`` triples."""
    canon = sorted((min(u, v), max(u, v), w) for u, v, w in edges)
    return Graph(n, W, tuple(canon))


def load_graph(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode()
    header = None
    raw = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise GraphFormatError(lineno, f"non-integer field in {line!r}") from None
        if tag == "p":
            if header is not None:
                raise GraphFormatError(lineno, "duplicate header")
            if len(nums) != 3 or min(nums) < 0:
                raise GraphFormatError(lineno, "header must be 'p <n> <m> <W>'")
            if nums[2] < 1:
                raise GraphFormatError(lineno, "W must be at least 1")
            header = nums
        elif tag == "e":
            if header is None:
                raise GraphFormatError(lineno, "edge before header")
            if len(nums) != 3:
                raise GraphFormatError(lineno, "edge must be 'e <u> <v> <w>'")
            u, v, w = nums
            n, _, W = header
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(lineno, f"vertex out of range [0, {n})")
            if u == v:
                raise GraphFormatError(lineno, f"self-loop at vertex {u}")
            if not 1 <= w <= W:
                raise GraphFormatError(lineno, f"weight {w} exceeds W={W}" if w > W else f"weight {w} below 1")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(lineno, f"duplicate edge {key}")
            seen.add(key)
            raw.append((key[0], key[1], w))
        else:
            raise GraphFormatError(lineno, f"unknown record type {tag!r}")
    if header is None:
        raise GraphFormatError(0, "missing header")
    n, m, W = header
    if len(raw) != m:
        raise GraphFormatError(0, f"header declares {m} edges, found {len(raw)}")
    return Graph(n, W, tuple(sorted(raw)))


def dump_graph(g: Graph) -> str:
    lines = [f"p {g.n} {g.m} {g.W}"]
    lines.extend(f"e {u} {v} {w}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"


def generate_random_graph(n: int, m: int, W: int, seed: int) -> Graph:
    """Connected random graph: a random spanning tree plus ``m - n + 1`` extra edges."""
    if n < 2 or not (n - 1 <= m <= n * (n - 1) // 2):
        raise ValueError(f"infeasible graph size n={n}, m={m}")
    if W < 1:
        raise ValueError("W must be at least 1")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    pairs = set()
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        pairs.add((min(a, b), max(a, b)))
    extra = m - (n - 1)
    if extra > (n * (n - 1) // 2 - len(pairs)) // 2:
        rest = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in pairs]
        pairs.update(rng.sample(rest, extra))
    else:
        while len(pairs) < m:
            a, b = rng.randrange(n), rng.randrange(n)
            if a != b:
                pairs.add((min(a, b), max(a, b)))
    edges = tuple((u, v, rng.randint(1, W)) for u, v in sorted(pairs))
    return Graph(n, W, edges)


@dataclass(frozen=True)
class PerturbedGraph:
    """A graph whose weights are ``w * M + rho`` with distinct small offsets ``rho``.

    ``M`` is a power of two and every ``rho < M / n``, so the offsets along any
    simple path sum to less than ``M`` and ``perturbed // M`` recovers the base
    weight of that path.
    """

    base: Graph
    M: int
    rho: tuple[int, ...]
    seed: int
    pweights: tuple[int, ...] = field(init=False)
    adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = self.base
        if len(self.rho) != g.m:
            raise ValueError("one offset per edge required")
        if self.M & (self.M - 1) or self.M <= 0:
            raise ValueError("M must be a power of two")
        if len(set(self.rho)) != len(self.rho) or any(not (1 <= r and r * g.n < self.M) for r in self.rho):
            raise ValueError("offsets must be distinct and in [1, M/n)")
        pw = tuple(w * self.M + r for (_, _, w), r in zip(g.edges, self.rho))
        adj = [[] for _ in range(g.n)]
        for eid, (u, v, _) in enumerate(g.edges):
            adj[u].append((v, pw[eid], eid))
            adj[v].append((u, pw[eid], eid))
        object.__setattr__(self, "pweights", pw)
        object.__setattr__(self, "adj", tuple(tuple(a) for a in adj))

    @property
    def n(self) -> int:
        return self.base.n

    def recover(self, pdist) -> int | None:
        """Base-weight value of a perturbed distance; ``None`` for the top value."""
        if pdist == INF:
            return None
        return pdist // self.M


def perturbation_scale(n: int, m: int, spread_bits: int = 32) -> int:
    target = n * (m + 1) << spread_bits
    return 1 << max(0, (target - 1).bit_length())


def perturb_weights(g: Graph, seed: int, spread_bits: int = 32) -> PerturbedGraph:
    """Widen weights with distinct pseudorandom offsets drawn from ``[1, M/n)``.

    ``spread_bits`` enlarges ``M`` beyond ``n * (m + 1)`` so that exact ties
    between distinct paths are improbable; ties that do occur are detected by
    the shortest-path engine and answered by reseeding.
    """
    M = perturbation_scale(g.n, g.m, spread_bits)
    hi = (M - 1) // g.n
    rng = random.Random(seed)
    rho = tuple(rng.sample(range(1, hi + 1), g.m))
    return PerturbedGraph(g, M, rho, seed)
