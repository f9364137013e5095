import random

from hypothesis import given
from hypothesis import strategies as st

from ftoracle.graph import generate_random_graph
from ftoracle.harness import VerifyReport, adaptive_faults, compare, run_verify, sample_queries
from ftoracle.oracle import FaultTolerantOracle
from ftoracle.pathform import EMPTY, pf_expand
from ftoracle.sp import brute_replacement_path

from conftest import graphs, path_edge_ids, tables_for


@given(graphs(n_min=3, n_max=12), st.integers(1, 3), st.integers(0, 1000))
def test_adaptive_faults_follow_replacement_paths(g, k, seed):
    tables = tables_for(g)
    rng = random.Random(seed)
    s, t = rng.sample(range(g.n), 2)
    faults = adaptive_faults(tables, s, t, k, rng, uniform_share=0.0)
    assert len(set(faults)) == len(faults) <= k
    for i, e in enumerate(faults):
        p = brute_replacement_path(tables, s, t, faults[:i])
        assert e in path_edge_ids(g, pf_expand(tables, p))
    if len(faults) < k:
        assert brute_replacement_path(tables, s, t, faults) is EMPTY


def test_sample_queries_deterministic_and_sized():
    tables = tables_for(generate_random_graph(12, 20, 3, 0))
    a = sample_queries(tables, 40, 7, 3, min_faults=2)
    assert a == sample_queries(tables, 40, 7, 3, min_faults=2)
    assert all(s != t and len(f) <= 3 for s, t, f in a)


def test_compare_flags_corruption():
    g = generate_random_graph(10, 16, 4, 3)
    o = FaultTolerantOracle.build(g, 1, 3)
    s, t = 0, 5
    e = brute_replacement_path(o.tables, s, t).links[0]
    assert compare(o, s, t, [e])[0] is None
    o.store.corrupted = True
    mismatch, res, _ = compare(o, s, t, [e])
    if res.weight != brute_replacement_path(o.tables, s, t, [e]).weight:
        assert mismatch["kind"] == "weight" and mismatch["faults"] == [list(g.endpoints(e))]


def test_replayed_queries_match_sampled_run():
    g = generate_random_graph(10, 16, 4, 8)
    o = FaultTolerantOracle.build(g, 2, 8)
    a = run_verify(o, 25, 4)
    b = run_verify(o, 0, 0, queries=sample_queries(o.tables, 25, 4, 2))
    assert a.trials == b.trials == 25
    assert a.jump_max == b.jump_max and a.set_max == b.set_max


def test_report_bounds_gate_pass():
    rep = VerifyReport(set_bounds={"fi1": 8, "fi2": 4, "fi3": 2}, fi1_per_level_bound=10)
    assert rep.passed
    rep.set_max["fi2"] = 5
    assert not rep.bounds_ok and not rep.passed
    rep.set_max["fi2"] = 0
    rep.jump_violations = 1
    assert not rep.passed
    rep.jump_violations = 0
    rep.mismatches.append({})
    assert rep.bounds_ok and not rep.passed
    assert rep.to_dict()["passed"] is False
