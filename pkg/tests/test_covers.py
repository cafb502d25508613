import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import random_graph
from strata.covers import CoverError, branched_cover, iterate_covers, small_count
from strata.graph import FULL, HOLLOW, graph, profile, simple_cycles


def g18(k):
    return graph({"a": FULL, "c": FULL}, [("e1", "a", "a", k)])


@pytest.mark.parametrize("k", [2, 3])
def test_graph18_small_count(k):
    step = branched_cover(g18(k), ["e1"], k)
    assert small_count(step, {"a", "c"}).total == k + 1


def test_loop_of_weight_k_disappears():
    step = branched_cover(g18(2), ["e1"], 2)
    assert step.result.edges == ()
    assert step.result.valency("a") == 0


def test_heavier_cycle_edge_survives_as_fraction():
    step = branched_cover(g18(5), ["e1"], 2)
    assert step.result.weight("e1") == Fraction(5, 2)
    assert not step.result.source


def test_theta_double_cover():
    g = graph({"a": FULL, "b": FULL}, [("e1", "a", "b", 2), ("e2", "a", "b", 2), ("e3", "a", "b", 3)])
    step = branched_cover(g, ["e1", "e2"], 2)
    assert sorted(e.id for e in step.result.edges) == ["e3^1", "e3^2"]
    assert small_count(step, {"a", "b"}).total == 2


def test_graph10_233_triple_cover():
    g = graph({"a": FULL, "b": FULL}, [("e1", "a", "a", 3), ("e2", "a", "b", 2)])
    assert small_count(branched_cover(g, ["e1"], 3), {"a", "b"}).total == 4


def test_no_small_off_cycle():
    g = graph({"a": FULL, "h": HOLLOW}, [("e1", "a", "a", 4)])
    for k in (2, 3, 4):
        assert small_count(branched_cover(g, ["e1"], k), {"a"}).total == 1


def test_errors():
    with pytest.raises(CoverError, match="cycle weight below k"):
        branched_cover(g18(2), ["e1"], 3)
    g = graph({"a": FULL, "b": FULL}, [("e1", "a", "b", 2)])
    with pytest.raises(CoverError, match="not a simple cycle"):
        branched_cover(g, ["e1"], 2)


def test_empty_plan_is_identity():
    g = g18(2)
    tr = iterate_covers(g, [])
    assert tr.final == g and tr.totals == ()


def test_disjoint_cycles_two_step_plan():
    g = graph({"a": FULL, "b": FULL}, [("e1", "a", "a", 2), ("e2", "b", "b", 2)])
    tr = iterate_covers(g, [(["e1"], 2), (["e2^1"], 2)])
    assert tr.totals[-1] >= 4


def test_graph14_both_full_doubling():
    g = graph({"L": FULL, "R": FULL, "f": FULL},
              [("e1", "L", "R", 2), ("e2", "L", "R", 3), ("e3", "L", "f", 2), ("e4", "R", "f", 2)])
    assert iterate_covers(g, [(["e1", "e2"], 2)]).totals == (4,)


def _check_identities(g, cyc, k):
    step = branched_cover(g, cyc.edges, k)
    on = set(cyc.vertices)
    r = step.result
    assert len(r.vertices) == len(on) + k * (len(g.vertices) - len(on))
    survivors = sum(1 for e in cyc.edges if g.weight(e) > k)
    n_edges = len(g.edges) + len(g.circles)
    assert len(r.edges) + len(r.circles) == survivors + k * (n_edges - len(cyc.edges))
    # incidence of the result is the lifted incidence of the base
    for e in r.edges:
        base = g.edge(step.edge_map[e.id]) if g.has_edge(step.edge_map[e.id]) else None
        if base is not None:
            assert {step.vertex_map[e.u], step.vertex_map[e.v]} == {base.u, base.v}

    def contrib(edges, v):
        return sum(2 if e.is_loop else 1 for e in edges if v in (e.u, e.v))

    kept = [g.edge(e) for e in cyc.edges if g.has_edge(e) and g.weight(e) > k]
    others = [e for e in g.edges if e.id not in cyc.edge_set]
    for v in on:
        assert r.valency(v) == k * contrib(others, v) + contrib(kept, v)
    small = {v.id for v in g.vertices if v.mark == FULL}
    sc = small_count(step, small)
    assert sc.total == k * len(small - on) + sum(1 for v in on if g.is_full(v))
    profile(r)  # Euler identities hold on every cover


def test_thousand_random_cover_instances():
    rng = random.Random(20240611)
    done = 0
    while done < 1000:
        g = random_graph(rng)
        cycles = simple_cycles(g)
        if not cycles:
            continue
        cyc = rng.choice(cycles)
        wmin = min(g.weight(e) for e in cyc.edges)
        ks = [k for k in (2, 3) if k <= wmin]
        if not ks:
            continue
        _check_identities(g, cyc, rng.choice(ks))
        done += 1


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_cover_identities_property(seed, k):
    g = random_graph(random.Random(seed), max_weight=4)
    for cyc in simple_cycles(g):
        if min(g.weight(e) for e in cyc.edges) >= k:
            _check_identities(g, cyc, k)
