import json
import random
import time

import pytest
from hypothesis import given, strategies as st

from oracles import brute_force, random_spec
from strata.cohomology import (
    SCENARIOS,
    GradedDims,
    GysinError,
    MapConstraint,
    RingPattern,
    SequenceSpec,
    SpecError,
    Term,
    catalog,
    gysin_reduce,
    load_scenario,
    match_pattern,
    run_case,
    solve,
)

S7 = (1, 0, 0, 0, 0, 0, 0, 1)
S3S4 = (1, 0, 0, 1, 1, 0, 0, 1)


def _names(patterns):
    return {p.name for p in patterns}


def test_exactness_forces_isomorphism():
    spec = SequenceSpec((Term("A", ("a",)), Term("B", (3,))))
    assert [s.values for s in solve(spec)] == [{"a": 3}]


def test_contradiction_is_empty():
    spec = SequenceSpec((Term("A", (1,)), Term("B", (2,))), (MapConstraint("injective"),))
    assert solve(spec) == []


def test_unbounded_unknown():
    spec = SequenceSpec((Term("A", ("x",)), Term("B", ("y",))))
    with pytest.raises(SpecError, match="unbounded"):
        solve(spec)


def test_duality_argument():
    spec = SequenceSpec((Term("A", ("x",)), Term("B", (2,)), Term("C", ("y",))))
    sols = solve(spec, duality=[("x", "y")])
    assert [s.values for s in sols] == [{"x": 1, "y": 1}]


def test_unknown_map_kind():
    with pytest.raises(SpecError):
        MapConstraint("bijective")


def test_complex_not_exact():
    spec = SequenceSpec((Term("A", (1,)), Term("B", ("x",)), Term("C", (1,))), exact=False)
    with pytest.raises(SpecError):
        solve(spec)


@pytest.mark.parametrize("case, expected", [
    ("two-point-6", {(1, 0, 1, 0, 1, 0, 1)}),
    ("two-point-7", {S7, S3S4}),
    ("two-point-9", {(1, 0, 1, 0, 0, 0, 0, 1, 0, 1), (1, 0, 1, 1, 1, 1, 1, 1, 0, 1)}),
    ("one-point-6", {(1, 0, 0, 0, 0, 0, 1)}),
    ("one-point-7", set()),
    ("one-point-9", {(1, 0, 0, 1, 0, 0, 1, 0, 0, 1)}),
])
def test_run_case(case, expected):
    t = time.perf_counter()
    res = run_case(case)
    assert time.perf_counter() - t < 1.0
    assert set(res.solutions) == expected
    assert res.verdict == ("contradiction" if not expected else "rationally elliptic")
    for b in res.solutions:
        assert b == b[::-1] and b[0] == 1 and b[1] == 0


def test_two_point_9_ring_split():
    res = run_case("two-point-9")
    by_sol = dict(zip(res.solutions, res.branches))
    big = by_sol[(1, 0, 1, 1, 1, 1, 1, 1, 0, 1)]
    assert {b.pattern.name for b in big} == {"CP^3xS^3", "S^2xS^3xS^4"}
    assert {b.hypothesis for b in big} == {"z_2^2 != 0", "z_2^2 = 0"}
    reduced = {b.pattern.name: {p.name for p in b.reduced_patterns} for b in big}
    assert reduced == {"CP^3xS^3": {"S^3xS^7"}, "S^2xS^3xS^4": {"S^3xS^3xS^4"}}
    assert set(res.patterns) == {"S^2xS^7", "CP^3xS^3", "S^2xS^3xS^4"}


def test_case_result_serializes():
    d = run_case("two-point-6").to_dict()
    assert json.loads(json.dumps(d)) == d


@pytest.mark.parametrize("betti, expected", [
    ((1, 0, 1, 0, 1, 0, 1), {"CP^3", "S^2xS^4"}),
    (S3S4, {"S^3xS^4"}),
    ((1,) + (0,) * 9 + (1,), {"S^10"}),
])
def test_match_pattern(betti, expected):
    m = match_pattern(betti)
    assert _names(m.patterns) == expected and m.elliptic


def test_match_pattern_hints_and_errors():
    assert _names(match_pattern((1, 0, 1, 0, 1, 0, 1), hints={"ComplexProjective"}).patterns) == {"CP^3"}
    assert not match_pattern((1, 0, 5, 0, 5, 0, 1)).elliptic
    with pytest.raises(ValueError):
        match_pattern((1, 0, 2))  # not Poincare dual


@pytest.mark.parametrize("dim", range(2, 12))
def test_catalog_betti_is_dual(dim):
    for p in catalog(dim):
        assert p.betti == p.betti[::-1] and len(p.betti) == dim + 1


@pytest.mark.parametrize("factors, expected", [
    ((("S", 2), ("S", 4)), S3S4),
    ((("CP", 3), ("S", 3)), (1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1)),
    ((("S", 2), ("S", 3), ("S", 4)), (1, 0, 0, 2, 1, 0, 1, 2, 0, 0, 1)),
    ((("CP", 3),), S7),
])
def test_gysin(factors, expected):
    kind = "ProductThreeSpheres" if len(factors) == 3 else "x"
    p = RingPattern(kind, factors)
    assert gysin_reduce(p.betti, p) == expected


def test_gysin_inconsistent():
    with pytest.raises(GysinError):
        gysin_reduce((1, 0, 1, 0, 1, 0, 1), {0: 1, 2: 2})
    with pytest.raises(GysinError):
        gysin_reduce((1, 0, 0, 1), {0: 1})


def test_lemma_side_conditions():
    assert RingPattern("ProductTwoSpheres", (("S", 3), ("S", 4))).lemma_applies
    assert not RingPattern("ProductTwoSpheres", (("S", 2), ("S", 4))).lemma_applies
    assert RingPattern("ProductThreeSpheres", (("S", 3), ("S", 3), ("S", 4))).lemma_applies
    assert not RingPattern("ProductThreeSpheres", (("S", 2), ("S", 3), ("S", 4))).lemma_applies


def test_graded_dims_tags():
    m = GradedDims("b", (None,) * 7, simply_connected_closed=True, poincare=True)
    assert dict(m.fixed()) == {"b0": 1, "b1": 0, "b6": 1}
    assert ("b2", "b4") in m.duality()


def test_scenarios_cover_six_cases():
    assert sorted(SCENARIOS) == sorted(["two-point-6", "two-point-7", "two-point-9",
                                        "one-point-6", "one-point-7", "one-point-9"])


def test_load_scenario_sequence_and_case():
    seq = load_scenario(json.dumps({"kind": "sequence", "terms": [["A", "a"], ["B", 3]], "maps": [None]}))
    assert [s.values for s in solve(seq)] == [{"a": 3}]
    case = load_scenario(json.dumps({
        "kind": "case", "id": "mine", "dim": 6,
        "L1": {"factors": [["S", 2]]}, "L2": {"factors": [["S", 2]]},
        "E": {"factors": [["S", 3], ["S", 2]]}, "facts": [["injective", "L1"]]}))
    assert run_case(case).solutions == ((1, 0, 1, 0, 1, 0, 1),)
    with pytest.raises(SpecError):
        load_scenario("{not json")


def test_alternating_sum_vanishes_on_solved_specs():
    rng = random.Random(3)
    for _ in range(300):
        spec = random_spec(rng)
        if not (spec.zero_start and spec.zero_end):
            continue
        for sol in solve(spec):
            dims = sol.dims(spec)
            assert sum((-1) ** i * d for i, d in enumerate(dims)) == 0


def test_solver_against_brute_force_thousand_specs():
    rng = random.Random(11)
    for _ in range(1000):
        spec = random_spec(rng)
        got = {tuple(sorted(s.values.items())) for s in solve(spec)}
        assert got == brute_force(spec), spec


@given(st.integers(0, 2**32 - 1))
def test_solver_against_brute_force_property(seed):
    spec = random_spec(random.Random(seed))
    assert {tuple(sorted(s.values.items())) for s in solve(spec)} == brute_force(spec)
