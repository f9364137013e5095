"""Paths as alternating shortest-path segments and interleaving edges.

A segment ``(a, b, w)`` names the unique shortest ``a``-``b`` path of
perturbed weight ``w``. ``links[i]`` joins segment ``i`` to segment ``i + 1``:
either ``None`` (the segments share an endpoint) or an edge id.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import INF


class PathFormError(ValueError):
    pass


class EmptyPath:
    """The absent path; its weight is the top value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"

    def __bool__(self):
        return False


EMPTY = EmptyPath()


@dataclass(frozen=True)
class PathForm:
    source: int
    target: int
    segments: tuple[tuple[int, int, int], ...]
    links: tuple[int | None, ...]
    weight: int

    @property
    def k(self) -> int:
        return len(self.segments)


def _link_weight(tables, link):
    return 0 if link is None else tables.pweight[link]


def make_pathform(tables, segments, links=None) -> PathForm:
    segs = tuple((a, b, tables.dist[a][b]) for a, b in segments)
    if links is None:
        links = (None,) * (len(segs) - 1)
    links = tuple(links)
    if len(links) != len(segs) - 1 or not segs:
        raise PathFormError("need k segments and k-1 links")
    w = sum(s[2] for s in segs) + sum(_link_weight(tables, e) for e in links)
    return PathForm(segs[0][0], segs[-1][1], segs, links, w)


def pf_segment(tables, a: int, b: int) -> PathForm:
    d = tables.dist[a][b]
    if d == INF:
        return EMPTY
    return PathForm(a, b, ((a, b, d),), (), d)


def pf_weight(p) -> int | float:
    return INF if p is EMPTY else p.weight


def pf_reverse(p: PathForm) -> PathForm:
    segs = tuple((b, a, w) for a, b, w in reversed(p.segments))
    return PathForm(p.target, p.source, segs, tuple(reversed(p.links)), p.weight)


def pf_concat(tables, a: PathForm, b: PathForm) -> PathForm:
    """Join two forms at a shared vertex, merging the junction segments when their
    union is itself the shortest path."""
    if a is EMPTY or b is EMPTY:
        raise PathFormError("cannot concatenate the empty path")
    if a.target != b.source:
        raise PathFormError(f"endpoint mismatch: {a.target} != {b.source}")
    x, y, w1 = a.segments[-1]
    _, z, w2 = b.segments[0]
    dxz = tables.dist[x][z]
    if w1 + w2 == dxz:
        segs = a.segments[:-1] + ((x, z, dxz),) + b.segments[1:]
        links = a.links + b.links
    else:
        segs = a.segments + b.segments
        links = a.links + (None,) + b.links
    return PathForm(a.source, b.target, segs, links, a.weight + b.weight)


def pf_contains_edge(tables, p: PathForm, eid: int) -> bool:
    if eid in p.links:
        return True
    return any(tables.edge_on_path(a, b, eid) for a, b, _ in p.segments)


def pf_avoids(tables, p: PathForm, faults) -> bool:
    return not any(pf_contains_edge(tables, p, e) for e in faults)


def _first_on_segment(tables, a: int, b: int, r: int) -> int:
    """First vertex on the shortest a->b path at distance >= r (0 < r <= |ab|)."""
    trees = tables.trees
    dist = tables.dist
    cur = a
    while r > 0:
        lvl = r.bit_length() - 1
        nxt = trees[cur].pow2_first[b][lvl]
        step = dist[cur][nxt]
        if step >= r:
            return nxt
        r -= step
        cur = nxt
    return cur


def pf_locate(tables, p: PathForm, d):
    """``(vertex, offset)`` of the first vertex at cumulative weight ``>= d``, or ``None``."""
    if p is EMPTY or d > p.weight:
        return None
    if d <= 0:
        return p.source, 0
    cum = 0
    segs = p.segments
    for i, (a, b, w) in enumerate(segs):
        if d <= cum + w:
            r = d - cum
            if r <= 0:
                return a, cum
            v = _first_on_segment(tables, a, b, r)
            return v, cum + tables.dist[a][v]
        cum += w
        if i < len(p.links):
            link = p.links[i]
            if link is not None:
                cum += tables.pweight[link]
                if d <= cum:
                    return segs[i + 1][0], cum
    return None


def pf_first_at_distance(tables, p: PathForm, d):
    hit = pf_locate(tables, p, d)
    return None if hit is None else hit[0]


def pf_expand(tables, p: PathForm) -> list[int]:
    verts = []
    for i, (a, b, _) in enumerate(p.segments):
        piece = tables.tree_path(a, b)
        if verts and verts[-1] == piece[0]:
            piece = piece[1:]
        verts.extend(piece)
    if len(set(verts)) != len(verts):
        raise PathFormError(f"expansion is not simple: {verts}")
    return verts


def path_edges(tables, verts) -> list[int]:
    g = tables.graph
    out = []
    for a, b in zip(verts, verts[1:]):
        eid = g.edge_id(a, b)
        if eid is None:
            raise PathFormError(f"no edge between {a} and {b}")
        out.append(eid)
    return out


def pf_from_edges(tables, verts) -> PathForm:
    """One degenerate segment per vertex, joined by explicit edges."""
    eids = path_edges(tables, verts)
    segs = tuple((v, v, 0) for v in verts)
    w = sum(tables.pweight[e] for e in eids)
    return PathForm(verts[0], verts[-1], segs, tuple(eids), w)


def pf_from_vertices(tables, verts) -> PathForm:
    """Fewest-segment form of an explicit vertex path.

    Each segment is extended while it stays a shortest path; the next edge then
    becomes an interleaving link.
    """
    eids = path_edges(tables, verts)
    pw = tables.pweight
    dist = tables.dist
    segs = []
    links = []
    i = 0
    last = len(verts) - 1
    while True:
        a = verts[i]
        j = i
        cum = 0
        while j < last and dist[a][verts[j + 1]] == cum + pw[eids[j]]:
            cum += pw[eids[j]]
            j += 1
        segs.append((a, verts[j], cum))
        if j == last:
            break
        links.append(eids[j])
        i = j + 1
    w = sum(pw[e] for e in eids)
    return PathForm(verts[0], verts[-1], tuple(segs), tuple(links), w)


def _longest_shortest_prefix(tables, p: PathForm, start: int, off: int):
    """Farthest vertex ``v`` (with its offset) such that ``p[start, v]`` is a shortest path."""
    row = tables.dist[start]
    lo, hi = off, p.weight
    best = (start, off)
    # v(d) is monotone in d and so is the shortest-prefix predicate
    while lo <= hi:
        mid = (lo + hi) // 2
        v, o = pf_locate(tables, p, mid)
        if row[v] == o - off:
            best = (v, o)
            lo = o + 1
        else:
            hi = mid - 1
    return best


def pf_canonical(tables, p):
    """Fewest-segment form of ``p`` computed on the segment level.

    Greedily extends each segment as far as it remains a shortest path, using
    binary search over offsets, so the cost is polylogarithmic per segment.
    """
    if p is EMPTY or p.k == 1:
        return p
    segs = []
    links = []
    start, off = p.source, 0
    while True:
        end, eoff = _longest_shortest_prefix(tables, p, start, off)
        segs.append((start, end, eoff - off))
        if end == p.target and eoff == p.weight:
            break
        nxt, noff = pf_locate(tables, p, eoff + 1)
        eid = tables.graph.edge_id(end, nxt)
        if eid is None or tables.pweight[eid] != noff - eoff:
            raise PathFormError(f"no edge joins {end} and {nxt} at offset {eoff}")
        links.append(eid)
        start, off = nxt, noff
    return PathForm(p.source, p.target, tuple(segs), tuple(links), p.weight)


def pf_validate(tables, p, k: int) -> str | None:
    """First violated invariant of ``p`` as text, or ``None``."""
    if p is EMPTY:
        return None
    if not p.segments:
        return "no segments"
    if len(p.links) != len(p.segments) - 1:
        return "segment/link count mismatch"
    if p.segments[0][0] != p.source:
        return "first segment does not start at source"
    if p.segments[-1][1] != p.target:
        return "last segment does not end at target"
    total = 0
    for i, (a, b, w) in enumerate(p.segments):
        if tables.dist[a][b] != w:
            return f"segment {i} ({a},{b}) weight {w} != shortest distance {tables.dist[a][b]}"
        total += w
        if i < len(p.links):
            nxt = p.segments[i + 1][0]
            link = p.links[i]
            if link is None:
                if b != nxt:
                    return f"chain break between segments {i} and {i + 1}"
            else:
                u, v, _ = tables.edges[link]
                if {u, v} != {b, nxt}:
                    return f"link {i} edge ({u},{v}) does not join {b} and {nxt}"
                total += tables.pweight[link]
    if total != p.weight:
        return f"cached weight {p.weight} != {total}"
    if p.k > k:
        return f"{p.k} segments exceed bound {k}"
    return None


def pf_better(tables, best, cand):
    """Lighter path wins; equal weights (same path) prefer fewer segments."""
    if cand is EMPTY:
        return best
    if best is EMPTY:
        return cand
    if cand.weight < best.weight or (cand.weight == best.weight and cand.k < best.k):
        return cand
    return best


def pf_to_json(tables, p, expand: bool = False) -> dict:
    if p is EMPTY:
        return {"w": None, "segments": []}
    items = []
    for i, (a, b, _) in enumerate(p.segments):
        items.append(["S", a, b])
        if i < len(p.links) and p.links[i] is not None:
            u, v, _ = tables.edges[p.links[i]]
            if u != b:
                u, v = v, u
            items.append(["E", u, v])
    out = {"w": tables.recover(p.weight), "segments": items}
    if expand:
        out["expanded"] = pf_expand(tables, p)
    return out
