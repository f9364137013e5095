import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftoracle.graph import INF, generate_random_graph, make_graph
from ftoracle.pathform import EMPTY, pf_expand, pf_weight
from ftoracle.sp import brute_replacement_path, dijkstra_avoiding, in_subtree, tree_path_intact

from conftest import base_dijkstra, graphs, path_edge_ids, perturbed_length, simple_paths, tables_for


def _eid(g, u, v):
    return g.edge_id(u, v)


# -- trees -------------------------------------------------------------------------


def test_path_tree_distances_and_pow2(path5):
    tables = tables_for(path5)
    tree = tables.trees[0]
    assert [tables.recover(d) for d in tree.dist] == [0, 1, 2, 3, 4]
    lvl = (2 * tables.M).bit_length() - 1
    assert tree.pow2_first[4][lvl] == 2


def test_triangle_parent(triangle):
    tables = tables_for(triangle)
    assert tables.trees[0].parent[2] == 1


def test_cycle_parent_follows_lighter_arc(cycle6):
    for seed in range(5):
        tables = tables_for(cycle6, seed)
        via2 = perturbed_length(tables, [0, 1, 2, 3])
        via4 = perturbed_length(tables, [0, 5, 4, 3])
        assert tables.trees[0].parent[3] == (2 if via2 < via4 else 4)
        assert tables_for(cycle6, seed).trees[0].parent[3] == tables.trees[0].parent[3]


@given(graphs(n_max=14), st.data())
def test_tree_invariants(g, data):
    tables = tables_for(g)
    s = data.draw(st.integers(0, g.n - 1))
    tree = tables.trees[s]
    for v in range(g.n):
        path = tree.path_to(v)
        assert path[0] == s and path[-1] == v
        assert perturbed_length(tables, path) == tree.dist[v]
    for x in range(g.n):
        for u in range(g.n):
            assert in_subtree(tables, s, x, u) == (x in tree.path_to(u))


@given(graphs(n_max=12), st.data())
def test_pow2_first_matches_scan(g, data):
    tables = tables_for(g)
    s = data.draw(st.integers(0, g.n - 1))
    tree = tables.trees[s]
    for t in range(g.n):
        path = tree.path_to(t)
        for i in range(tables.levels + 1):
            th = 1 << i
            expected = next((v for v in path if tree.dist[v] >= th), -1)
            assert tree.pow2_first[t][i] == expected
            if expected >= 0 and expected != s:
                assert tree.dist[tree.parent[expected]] < th


# -- Dijkstra with faults ---------------------------------------------------------------


def test_triangle_avoiding(triangle):
    tables = tables_for(triangle)
    dist, _ = dijkstra_avoiding(tables.gp, 0, [_eid(triangle, 0, 1)])
    assert tables.recover(dist[2]) == 3


def test_bridge_disconnects(path5):
    tables = tables_for(path5)
    dist, parent = dijkstra_avoiding(tables.gp, 0, [_eid(path5, 2, 3)])
    assert dist[4] == INF and parent[4] == -1


def test_cycle_avoiding(cycle6):
    tables = tables_for(cycle6)
    dist, parent = dijkstra_avoiding(tables.gp, 0, [_eid(cycle6, 0, 1)])
    assert tables.recover(dist[3]) == 3
    assert [parent[3], parent[4], parent[5]] == [4, 5, 0]


@given(graphs(n_max=14))
def test_avoiding_nothing_equals_tree(g):
    tables = tables_for(g)
    for s in range(g.n):
        assert tuple(dijkstra_avoiding(tables.gp, s)[0]) == tables.trees[s].dist


def test_replacement_distances_match_base_at_n40():
    rng = random.Random(4)
    for seed in range(3):
        g = generate_random_graph(40, 80, 6, seed)
        tables = tables_for(g)
        for _ in range(20):
            s = rng.randrange(40)
            faults = rng.sample(range(g.m), rng.randint(0, 3))
            pd, _ = dijkstra_avoiding(tables.gp, s, faults)
            bd = base_dijkstra(g, s, faults)
            assert [None if d == INF else d for d in bd] == [tables.recover(d) for d in pd]


# -- brute replacement paths ---------------------------------------------------------------


def test_brute_triangle(triangle):
    tables = tables_for(triangle)
    p = brute_replacement_path(tables, 0, 2, [_eid(triangle, 0, 1)])
    assert pf_expand(tables, p) == [0, 2]
    assert tables.recover(pf_weight(p)) == 3


def test_brute_without_faults_is_tree_path(cycle6_chords):
    tables = tables_for(cycle6_chords)
    for s in range(6):
        for t in range(6):
            p = brute_replacement_path(tables, s, t)
            assert pf_expand(tables, p) == tables.tree_path(s, t)


def test_brute_cycle(cycle6):
    tables = tables_for(cycle6)
    p = brute_replacement_path(tables, 0, 3, [_eid(cycle6, 1, 2)])
    assert pf_expand(tables, p) == [0, 5, 4, 3]


def test_brute_disconnected(path5):
    tables = tables_for(path5)
    assert brute_replacement_path(tables, 0, 4, [_eid(path5, 2, 3)]) is EMPTY


@given(graphs(n_min=3, n_max=7), st.data())
def test_brute_is_lightest_simple_path(g, data):
    tables = tables_for(g)
    s, t = data.draw(st.lists(st.integers(0, g.n - 1), min_size=2, max_size=2, unique=True))
    faults = data.draw(st.lists(st.integers(0, g.m - 1), max_size=2, unique=True))
    options = simple_paths(g, s, t, faults)
    p = brute_replacement_path(tables, s, t, faults)
    if not options:
        assert p is EMPTY
        return
    best = min(options, key=lambda vs: perturbed_length(tables, vs))
    assert pf_expand(tables, p) == best


# -- subtree and intactness predicates ---------------------------------------------------------


def test_in_subtree_examples(path5):
    tables = tables_for(path5)
    assert all(in_subtree(tables, 0, 0, u) for u in range(5))
    assert all(in_subtree(tables, 0, u, u) for u in range(5))
    assert not in_subtree(tables, 0, 3, 1)
    assert in_subtree(tables, 0, 1, 3)


def test_in_subtree_unreachable():
    g = make_graph(4, 1, [(0, 1, 1), (2, 3, 1)])
    tables = tables_for(g)
    with pytest.raises(ValueError):
        in_subtree(tables, 0, 1, 3)


def test_tree_path_intact_examples(path5, triangle):
    tp = tables_for(path5)
    assert tree_path_intact(tp, 0, 4, [])
    assert not tree_path_intact(tp, 0, 4, [_eid(path5, 2, 3)])
    tt = tables_for(triangle)
    assert tree_path_intact(tt, 0, 2, [_eid(triangle, 0, 2)])
    assert not tree_path_intact(tt, 0, 2, [_eid(triangle, 1, 2)])


@given(graphs(n_max=14), st.data())
def test_edge_on_path_matches_expansion(g, data):
    tables = tables_for(g)
    s = data.draw(st.integers(0, g.n - 1))
    for t in range(g.n):
        on = set(path_edge_ids(g, tables.tree_path(s, t)))
        for e in range(g.m):
            assert tables.edge_on_path(s, t, e) == (e in on)
