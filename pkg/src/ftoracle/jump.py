from __future__ import annotations

from dataclasses import dataclass

from .graph import INF
from .pathform import EMPTY, PathForm, pf_locate, pf_reverse


def pow2_floor(d) -> int:
    """Largest power of two not exceeding ``d``; 0 for 0."""
    if d == INF:
        return INF
    return 0 if d <= 0 else 1 << (int(d).bit_length() - 1)


def nearest_fault_distance(tables, x: int, fault_vertices) -> int | float:
    row = tables.dist[x]
    return min((row[a] for a in fault_vertices), default=INF)


@dataclass(frozen=True)
class JumpSequence:
    vertices: tuple[int, ...]
    offsets: tuple[int, ...]  # cumulative path weight of each vertex from the start
    reversed: bool

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


def jump_bound(tables, f: int) -> int:
    return 16 * f * tables.levels + 2


def single_fault_jump_bound(tables) -> int:
    return 8 * tables.levels + 2


def find_jump(tables, p: PathForm, fault_vertices, reversed: bool = False) -> JumpSequence:
    """Jump sequence along ``p`` (or its reverse) relative to the fault endpoints.

    From ``x`` the next vertex is the first one at path distance at least
    ``max(M, (x a)_2)``, ``a`` the fault endpoint nearest to ``x``.
    """
    if p is EMPTY:
        return JumpSequence((), (), reversed)
    path = pf_reverse(p) if reversed else p
    unit = tables.M
    x, pos = path.source, 0
    verts, offs = [x], [0]
    while True:
        step = max(unit, pow2_floor(nearest_fault_distance(tables, x, fault_vertices)))
        if step == INF:
            break
        hit = pf_locate(tables, path, pos + step)
        if hit is None:
            break
        x, pos = hit
        verts.append(x)
        offs.append(pos)
    return JumpSequence(tuple(verts), tuple(offs), reversed)
