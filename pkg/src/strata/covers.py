"""k-fold branched covers of weighted graphs along a simple cycle, with small-point bookkeeping.

Cover rule: vertices on the cycle are kept once, every other vertex gets k
copies ``v^1 .. v^k``.  A cycle edge of weight w survives once with weight w/k
when w > k and disappears when w == k; every other edge (and every circle not
being covered) is copied k times with its weight unchanged.

Small points: every copy of a small off-cycle vertex stays small, an on-cycle
full vertex stays small, and an on-cycle hollow vertex is counted as not
small.  The last choice under-counts, so exclusions derived from it are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph import Circle, Cycle, Edge, GraphError, LabeledGraph, Vertex, cycle_from_edges


class CoverError(ValueError):
    pass


def copy_id(base_id: str, i: int) -> str:
    return f"{base_id}^{i}"


@dataclass(frozen=True)
class CoverStep:
    base: LabeledGraph
    cycle: Cycle
    k: int
    result: LabeledGraph
    vertex_map: Mapping[str, str]  # result vertex -> base vertex
    edge_map: Mapping[str, str]  # result edge/circle -> base edge/circle

    @property
    def on_cycle(self) -> frozenset[str]:
        return frozenset(self.cycle.vertices)


@dataclass(frozen=True)
class SmallCount:
    total: int
    k: int
    off_cycle_small: tuple[str, ...]
    on_cycle_full: tuple[str, ...]
    hollow_on_cycle: tuple[str, ...] = ()  # small hollow vertices counted as zero
    small_after: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.total != self.k * len(self.off_cycle_small) + len(self.on_cycle_full):
            raise AssertionError("small count does not match its itemization")


def _resolve(g: LabeledGraph, cycle) -> Cycle:
    if isinstance(cycle, Cycle):
        return cycle_from_edges(g, cycle.edges)
    try:
        return cycle_from_edges(g, cycle)
    except GraphError as exc:
        raise CoverError(str(exc)) from None


def branched_cover(g: LabeledGraph, cycle: Cycle | Iterable[str], k: int) -> CoverStep:
    """Build the k-fold cover of ``g`` branched along ``cycle``.

    Raises CoverError("cycle weight below k") when a cycle edge is too light
    and CoverError("not a simple cycle ...") for a bad edge set.
    """
    if int(k) != k or k < 2:
        raise CoverError(f"cover degree must be an integer >= 2, got {k}")
    k = int(k)
    cyc = _resolve(g, cycle)
    cyc_edges = cyc.edge_set
    for eid in cyc.edges:
        if g.weight(eid) < k:
            raise CoverError("cycle weight below k")
    on = set(cyc.vertices)
    vmap: dict[str, str] = {}
    emap: dict[str, str] = {}
    vertices: list[Vertex] = []
    for v in g.vertices:
        if v.id in on:
            vertices.append(v)
            vmap[v.id] = v.id
        else:
            for i in range(1, k + 1):
                nid = copy_id(v.id, i)
                vertices.append(Vertex(nid, v.mark))
                vmap[nid] = v.id

    def image(vid: str, i: int) -> str:
        return vid if vid in on else copy_id(vid, i)

    edges: list[Edge] = []
    circles: list[Circle] = []
    for e in g.edges:
        if e.id in cyc_edges:
            if e.weight > k:
                edges.append(Edge(e.id, e.u, e.v, e.weight / k))
                emap[e.id] = e.id
            continue
        for i in range(1, k + 1):
            nid = copy_id(e.id, i)
            edges.append(Edge(nid, image(e.u, i), image(e.v, i), e.weight))
            emap[nid] = e.id
    for c in g.circles:
        if c.id in cyc_edges:
            if c.weight > k:
                circles.append(Circle(c.id, c.weight / k))
                emap[c.id] = c.id
            continue
        for i in range(1, k + 1):
            nid = copy_id(c.id, i)
            circles.append(Circle(nid, c.weight))
            emap[nid] = c.id
    try:
        result = LabeledGraph(tuple(vertices), tuple(edges), tuple(circles), source=False)
    except GraphError as exc:  # id collision with an existing "^" name
        raise CoverError(f"cannot name cover elements: {exc}") from None
    return CoverStep(g, cyc, k, result, vmap, emap)


def small_vertices(models: Mapping[str, object]) -> frozenset[str]:
    """Ids whose model (anything with a ``small`` attribute, or a bool) is small."""
    return frozenset(v for v, m in models.items() if (m if isinstance(m, bool) else m.small))


def small_count(step: CoverStep, models: Mapping[str, object] | Iterable[str]) -> SmallCount:
    """Small points of the cover given the small points of the base.

    ``models`` is either a vertex -> LocalModel map or a set of small vertex ids.
    """
    small = small_vertices(models) if isinstance(models, Mapping) else frozenset(models)
    g, on = step.base, step.on_cycle
    off_small = tuple(sorted(v for v in small if v not in on))
    on_full = tuple(sorted(v for v in on if g.is_full(v)))
    hollow_on = tuple(sorted(v for v in on if v in small and not g.is_full(v)))
    after = frozenset(w for w, v in step.vertex_map.items()
                      if (v not in on and v in small) or (v in on and g.is_full(v)))
    return SmallCount(step.k * len(off_small) + len(on_full), step.k, off_small, on_full,
                      hollow_on, after)


@dataclass(frozen=True)
class CoverTrace:
    steps: tuple[CoverStep, ...]
    counts: tuple[SmallCount, ...]
    final: LabeledGraph
    final_small: frozenset[str]

    @property
    def totals(self) -> tuple[int, ...]:
        return tuple(c.total for c in self.counts)


def iterate_covers(g: LabeledGraph, plan: Sequence[tuple[Iterable[str] | Cycle, int]],
                   small: Mapping[str, object] | Iterable[str] | None = None) -> CoverTrace:
    """Apply a plan of (cycle edge ids in the current graph, k) left to right.

    ``small`` gives the small points of ``g``; by default the full vertices.
    """
    if small is None:
        cur_small = frozenset(g.full_vertices())
    elif isinstance(small, Mapping):
        cur_small = small_vertices(small)
    else:
        cur_small = frozenset(small)
    cur = g
    steps, counts = [], []
    for selector, k in plan:
        step = branched_cover(cur, selector, k)
        sc = small_count(step, cur_small)
        steps.append(step)
        counts.append(sc)
        cur, cur_small = step.result, sc.small_after
    return CoverTrace(tuple(steps), tuple(counts), cur, cur_small)
