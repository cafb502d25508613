import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import random_graph
from strata.graph import (
    FULL,
    HOLLOW,
    GraphError,
    GraphSyntaxError,
    canonical_form,
    cycle_from_edges,
    format_graph,
    graph,
    has_cycle,
    is_isomorphic,
    parse_graph,
    profile,
    simple_cycles,
)

THETA = graph({"a": FULL, "b": FULL}, [("e1", "a", "b", 2), ("e2", "a", "b", 3), ("e3", "a", "b", 4)])
G16 = graph({"T": FULL, "A": HOLLOW, "B": HOLLOW, "M": HOLLOW},
            [("e1", "T", "A", 2), ("e2", "T", "B", 2), ("e3", "T", "M", 3),
             ("e4", "A", "B", 3), ("e5", "A", "M", 3), ("e6", "B", "M", 2)])


def test_profile_theta():
    p = profile(THETA)
    assert (p.V, p.E, p.b0, p.C) == (2, 3, 1, 2)
    assert p.V3 == 2


def test_profile_graph16_shape():
    assert profile(G16).C == 3


def test_profile_isolated_point():
    p = profile(graph({"a": FULL}))
    assert (p.V, p.E, p.b0, p.C, p.V0) == (1, 0, 1, 0, 1)


def test_circle_is_a_component_with_one_cycle():
    g = graph({"a": FULL}, circles=[("c", 2)])
    p = profile(g)
    assert (p.b0, p.C, p.circles) == (2, 1, 1)


def test_simple_cycles_theta():
    cycles = simple_cycles(THETA)
    assert sorted(c.key for c in cycles) == [("e1", "e2"), ("e1", "e3"), ("e2", "e3")]


def test_simple_cycles_loop_and_tree():
    assert [c.key for c in simple_cycles(graph({"a": FULL}, [("e", "a", "a", 2)]))] == [("e",)]
    tree = graph({"a": FULL, "b": FULL, "c": FULL}, [("e1", "a", "b", 2), ("e2", "b", "c", 2)])
    assert simple_cycles(tree) == []


def test_simple_cycles_count_graph16():
    # K4: 4 triangles and 3 four-cycles
    assert len(simple_cycles(G16)) == 7


def test_has_cycle_respects_allowed_vertices_and_weight():
    assert has_cycle(THETA, {"a", "b"}, Fraction(3)) is not None
    assert has_cycle(THETA, {"a", "b"}, Fraction(4)) is None
    assert has_cycle(THETA, {"a"}, Fraction(2)) is None


def test_cycle_from_edges_rejects_non_cycle():
    with pytest.raises(GraphError, match="not a simple cycle"):
        cycle_from_edges(G16, ["e1", "e2"])


def test_parse_round_trip():
    text = "vertex a full\nvertex b hollow\nedge e1 a b 3  # comment\nedge e2 a a 2\ncircle c 5\n"
    g = parse_graph(text)
    assert parse_graph(format_graph(g)) == g
    assert profile(g).V == 2


def test_parse_three_line_file():
    g = parse_graph("vertex a full\nvertex b full\nedge e a b 2\n")
    p = profile(g)
    assert (p.V, p.E) == (2, 1)


@pytest.mark.parametrize("text, needle, line", [
    ("vertex a full\nvertex b full\nedge e a b 1\n", "weight < 2", 3),
    ("vertex a solid\n", "unknown marking", 1),
    ("vertex a full\nvertex a hollow\n", "duplicate", 2),
    ("vertex a full\nedge e a z 2\n", "dangling endpoint", 2),
    ("vertex a full\nnode b\n", "unknown directive", 2),
    ("vertex a full\nedge e a a x\n", "bad weight", 2),
])
def test_parse_errors_carry_line_numbers(text, needle, line):
    with pytest.raises(GraphSyntaxError, match=needle) as exc:
        parse_graph(text)
    assert exc.value.line == line


def test_derived_weights_may_be_rational():
    g = parse_graph("vertex a full\nedge e a a 3/2\n", source=False)
    assert g.weight("e") == Fraction(3, 2)
    with pytest.raises(GraphError):
        parse_graph("vertex a full\nedge e a a 3/2\n")


def test_canonical_form_distinguishes_marks_and_weights():
    assert canonical_form(THETA) != canonical_form(THETA.with_marks({"a": HOLLOW}))
    assert canonical_form(THETA) != canonical_form(THETA.with_weights({"e1": 5}))


def test_isomorphic_after_relabel():
    h = G16.relabel({"T": "x", "A": "y", "B": "z", "M": "w"}, {f"e{i}": f"f{7 - i}" for i in range(1, 7)})
    assert is_isomorphic(G16, h)
    assert not is_isomorphic(G16, G16.with_weights({"e1": 3}))


@given(st.integers(0, 2**32 - 1))
def test_euler_identities_on_random_graphs(seed):
    g = random_graph(random.Random(seed))
    p = profile(g)  # asserts both identities internally
    assert p.V - p.E + p.C == p.b0


@given(st.integers(0, 2**32 - 1))
def test_canonical_form_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    vids = [v.id for v in g.vertices]
    perm = vids[:]
    rng.shuffle(perm)
    eids = [e.id for e in g.edges]
    h = g.relabel(dict(zip(vids, perm)), {e: f"x{rng.random()}" for e in eids})
    assert canonical_form(g) == canonical_form(h)
