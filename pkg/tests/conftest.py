"""Shared fixtures, graph strategies and independent reference computations."""

from __future__ import annotations

import heapq
import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ftoracle.graph import INF, generate_random_graph, make_graph, perturb_weights
from ftoracle.sp import SPTables, UniquenessViolation

settings.register_profile(
    "default",
    max_examples=80,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def tables_for(graph, seed: int = 0, spread_bits: int = 32) -> SPTables:
    """Perturbed tables, reseeding on a detected tie."""
    for attempt in range(16):
        try:
            return SPTables(perturb_weights(graph, seed + attempt, spread_bits))
        except UniquenessViolation:
            continue
    raise AssertionError("ties persisted")


def base_dijkstra(graph, s: int, banned=()) -> list:
    """Plain Dijkstra on base weights (ties allowed), independent of the package."""
    banned = set(banned)
    adj = [[] for _ in range(graph.n)]
    for eid, (u, v, w) in enumerate(graph.edges):
        if eid not in banned:
            adj[u].append((v, w))
            adj[v].append((u, w))
    dist = [INF] * graph.n
    dist[s] = 0
    heap = [(0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            if d + w < dist[v]:
                dist[v] = d + w
                heapq.heappush(heap, (d + w, v))
    return dist


def simple_paths(graph, s: int, t: int, banned=()):
    """Every simple s-t path as a vertex list (tiny graphs only)."""
    banned = set(banned)
    adj = [[] for _ in range(graph.n)]
    for eid, (u, v, _) in enumerate(graph.edges):
        if eid not in banned:
            adj[u].append(v)
            adj[v].append(u)
    out = []

    def walk(path):
        u = path[-1]
        if u == t:
            out.append(list(path))
            return
        for v in adj[u]:
            if v not in path:
                path.append(v)
                walk(path)
                path.pop()

    walk([s])
    return out


def perturbed_length(tables, verts) -> int:
    g = tables.graph
    return sum(tables.pweight[g.edge_id(a, b)] for a, b in zip(verts, verts[1:]))


def path_edge_ids(graph, verts) -> list[int]:
    return [graph.edge_id(a, b) for a, b in zip(verts, verts[1:])]


def fault_subsets(m: int, k: int):
    for size in range(k + 1):
        yield from itertools.combinations(range(m), size)


@st.composite
def graphs(draw, n_min: int = 2, n_max: int = 10, w_max: int = 8):
    n = draw(st.integers(n_min, n_max))
    m_hi = min(n * (n - 1) // 2, 2 * n)
    m = draw(st.integers(n - 1, m_hi))
    W = draw(st.integers(1, w_max))
    seed = draw(st.integers(0, 10_000))
    return generate_random_graph(n, m, W, seed)


@pytest.fixture
def triangle():
    return make_graph(3, 3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)])


@pytest.fixture
def path5():
    return make_graph(5, 1, [(i, i + 1, 1) for i in range(4)])


@pytest.fixture
def cycle6():
    return make_graph(6, 1, [(i, (i + 1) % 6, 1) for i in range(6)])


@pytest.fixture
def cycle6_chords():
    """6-cycle with chords (0,2) and (3,5), all unit weights."""
    return make_graph(6, 1, [(i, (i + 1) % 6, 1) for i in range(6)] + [(0, 2, 1), (3, 5, 1)])


@pytest.fixture
def star():
    return make_graph(6, 1, [(0, i, 1) for i in range(1, 6)])
