"""Dijkstra on perturbed weights, shortest-path trees and the all-pairs tables.

Every Dijkstra run certifies uniqueness: a relaxation that exactly ties the
current label through a different parent raises :class:`UniquenessViolation`.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from dataclasses import dataclass

from .graph import INF, PerturbedGraph


class UniquenessViolation(RuntimeError):
    """Two distinct shortest paths of identical perturbed weight were found."""

    def __init__(self, source: int, vertex: int, paths: tuple[list[int], list[int]], banned=()):
        super().__init__(
            f"tie on perturbed distance from {source} to {vertex}: {paths[0]} vs {paths[1]}"
        )
        self.source = source
        self.vertex = vertex
        self.paths = paths
        self.banned = tuple(sorted(banned))


def _walk(parent, s, v):
    out = [v]
    while v != s:
        v = parent[v]
        out.append(v)
    out.reverse()
    return out


def dijkstra(gp: PerturbedGraph, s: int, banned=frozenset()):
    """Distances, parents and parent-edge ids from ``s`` with edges in ``banned`` deleted.

    Unreachable vertices get ``INF`` and parent ``-1``.
    """
    n = gp.n
    adj = gp.adj
    dist = [INF] * n
    parent = [-1] * n
    pedge = [-1] * n
    dist[s] = 0
    done = [False] * n
    heap = [(0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w, eid in adj[u]:
            if eid in banned:
                continue
            nd = d + w
            dv = dist[v]
            if nd < dv:
                dist[v] = nd
                parent[v] = u
                pedge[v] = eid
                heapq.heappush(heap, (nd, v))
            elif nd == dv and parent[v] != u and v != s:
                first = _walk(parent, s, v)
                second = _walk(parent, s, u) + [v]
                raise UniquenessViolation(s, v, (first, second), banned)
    return dist, parent, pedge


def dijkstra_avoiding(gp: PerturbedGraph, s: int, faults=()):
    dist, parent, _ = dijkstra(gp, s, frozenset(faults))
    return dist, parent


@dataclass(frozen=True)
class SpTree:
    root: int
    parent: tuple[int, ...]
    pedge: tuple[int, ...]
    dist: tuple
    euler_in: tuple[int, ...]
    euler_out: tuple[int, ...]
    pow2_first: tuple  # pow2_first[t][i]: first vertex on root->t at distance >= 2**i, or -1

    def reachable(self, v: int) -> bool:
        return self.dist[v] != INF

    def path_to(self, t: int) -> list[int]:
        if self.dist[t] == INF:
            raise ValueError(f"vertex {t} unreachable from {self.root}")
        return _walk(self.parent, self.root, t)


def build_sp_tree(gp: PerturbedGraph, s: int, levels: int) -> SpTree:
    """Shortest-path tree from ``s`` with Euler intervals and ``2**i`` first-vertex tables.

    ``levels`` is the largest exponent stored.
    """
    n = gp.n
    dist, parent, pedge = dijkstra(gp, s)
    children = [[] for _ in range(n)]
    for v in range(n):
        if parent[v] >= 0:
            children[parent[v]].append(v)
    tin = [-1] * n
    tout = [-1] * n
    table = [None] * n
    thresholds = [1 << i for i in range(levels + 1)]
    clock = 0
    stack_v: list[int] = []
    stack_d: list[int] = []
    work = [(s, 0)]
    while work:
        v, state = work.pop()
        if state == 0:
            tin[v] = clock
            clock += 1
            stack_v.append(v)
            stack_d.append(dist[v])
            row = []
            depth = len(stack_d)
            dv = dist[v]
            for th in thresholds:
                if th > dv:
                    row.extend([-1] * (levels + 1 - len(row)))
                    break
                row.append(stack_v[bisect_left(stack_d, th, 0, depth)])
            table[v] = tuple(row)
            work.append((v, 1))
            for c in reversed(children[v]):
                work.append((c, 0))
        else:
            tout[v] = clock - 1
            stack_v.pop()
            stack_d.pop()
    return SpTree(s, tuple(parent), tuple(pedge), tuple(dist), tuple(tin), tuple(tout), tuple(table))


class SPTables:
    """All-pairs perturbed distances plus one :class:`SpTree` per source."""

    def __init__(self, gp: PerturbedGraph):
        self.gp = gp
        self.graph = gp.base
        self.n = gp.n
        self.M = gp.M
        self.levels = max(1, (gp.n * gp.base.W * gp.M - 1).bit_length())
        self.trees = [build_sp_tree(gp, s, self.levels) for s in range(gp.n)]
        self.dist = [t.dist for t in self.trees]
        self.pweight = gp.pweights
        self.edges = gp.base.edges

    def recover(self, pdist):
        return self.gp.recover(pdist)

    def tree_path(self, a: int, b: int) -> list[int]:
        return self.trees[a].path_to(b)

    def edge_on_path(self, a: int, b: int, eid: int) -> bool:
        """Whether edge ``eid`` lies on the unique shortest ``a``-``b`` path."""
        dab = self.dist[a][b]
        if dab == INF:
            return False
        u, v, _ = self.edges[eid]
        w = self.pweight[eid]
        da, db = self.dist[a], self.dist[b]
        return da[u] + w + db[v] == dab or da[v] + w + db[u] == dab


def in_subtree(tables: SPTables, root: int, x: int, u: int) -> bool:
    """``u`` lies in the subtree of ``T_root`` hanging from ``x``."""
    tree = tables.trees[root]
    if not (tree.reachable(x) and tree.reachable(u)):
        raise ValueError(f"vertex unreachable from {root}")
    return tree.euler_in[x] <= tree.euler_in[u] <= tree.euler_out[x]


def tree_path_intact(tables: SPTables, s: int, t: int, faults) -> bool:
    """No fault edge lies on the shortest ``s``-``t`` path (vacuous if disconnected)."""
    return not any(tables.edge_on_path(s, t, e) for e in faults)


def brute_replacement_path(tables: SPTables, s: int, t: int, faults=()):
    """Replacement path by a fresh Dijkstra in ``G - faults``, as single-edge pieces."""
    from .pathform import EMPTY, pf_from_edges

    dist, parent = dijkstra_avoiding(tables.gp, s, faults)
    if dist[t] == INF:
        return EMPTY
    return pf_from_edges(tables, _walk(parent, s, t))
