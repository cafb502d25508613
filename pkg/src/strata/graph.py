"""Labeled multigraphs: hollow/full vertices, weighted edges, loops and parallel edges.

Graphs are immutable values.  Besides ordinary vertices and edges a graph may
carry vertex-free *circles*: closed singular curves with a weight but no
vertex on them.  They count as one component and one independent cycle.

Text format (one item per line, ``#`` starts a comment, order-insensitive)::

    vertex a full
    vertex h hollow
    edge e1 a h 2
    circle c1 3

>>> g = parse_graph("vertex a full\\nvertex b full\\nedge e a b 3\\n")
>>> profile(g).V, profile(g).E, profile(g).C
(2, 1, 0)
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import _kernels

HOLLOW = "hollow"
FULL = "full"
MARKS = (HOLLOW, FULL)


class GraphError(ValueError):
    """Structurally invalid graph."""


class GraphSyntaxError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def as_weight(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise GraphError("weights must be exact (int, Fraction or 'n/d' string)")
    return Fraction(value)


def format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


@dataclass(frozen=True, order=True)
class Vertex:
    id: str
    mark: str

    @property
    def full(self) -> bool:
        return self.mark == FULL


@dataclass(frozen=True, order=True)
class Edge:
    id: str
    u: str
    v: str
    weight: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def end(self, index: int) -> str:
        return self.u if index == 0 else self.v

    def other(self, vid: str) -> str:
        return self.v if vid == self.u else self.u


@dataclass(frozen=True, order=True)
class Circle:
    id: str
    weight: Fraction


@dataclass(frozen=True, order=True)
class HalfEdge:
    edge: str
    end: int


@dataclass(frozen=True)
class Cycle:
    """A vertex-simple cycle.

    ``half_edges[i]`` leaves ``vertices[i]``; a circle component is a cycle with
    a single half-edge on the circle and no vertices.
    """

    half_edges: tuple[HalfEdge, ...]
    vertices: tuple[str, ...]

    @property
    def edges(self) -> tuple[str, ...]:
        return tuple(h.edge for h in self.half_edges)

    @property
    def edge_set(self) -> frozenset[str]:
        return frozenset(self.edges)

    @property
    def key(self) -> tuple[str, ...]:
        """Order-independent selector: sorted edge ids."""
        return tuple(sorted(self.edges))

    def __len__(self) -> int:
        return len(self.half_edges)


@dataclass(frozen=True)
class LabeledGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = ()
    circles: tuple[Circle, ...] = ()
    source: bool = True

    def __post_init__(self):
        vs = tuple(sorted(v if isinstance(v, Vertex) else Vertex(*v) for v in self.vertices))
        es = []
        for e in self.edges:
            if not isinstance(e, Edge):
                eid, u, v, w = e
                e = Edge(eid, u, v, as_weight(w))
            elif not isinstance(e.weight, Fraction):
                e = Edge(e.id, e.u, e.v, as_weight(e.weight))
            es.append(e)
        cs = []
        for c in self.circles:
            if not isinstance(c, Circle):
                c = Circle(c[0], as_weight(c[1]))
            cs.append(c)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", tuple(sorted(es)))
        object.__setattr__(self, "circles", tuple(sorted(cs)))
        self._validate()

    def _validate(self) -> None:
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise GraphError(f"duplicate vertex id: {_first_dup(ids)}")
        eids = [e.id for e in self.edges] + [c.id for c in self.circles]
        if len(set(eids)) != len(eids):
            raise GraphError(f"duplicate edge id: {_first_dup(eids)}")
        vset = set(ids)
        for v in self.vertices:
            if v.mark not in MARKS:
                raise GraphError(f"unknown marking {v.mark!r} for vertex {v.id}")
        for e in self.edges:
            for x in (e.u, e.v):
                if x not in vset:
                    raise GraphError(f"edge {e.id} references missing vertex {x}")
        for item in itertools.chain(self.edges, self.circles):
            _check_weight(item.id, item.weight, self.source)

    # -- lookups -----------------------------------------------------------

    @cached_property
    def _vindex(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def _eindex(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def vertex(self, vid: str) -> Vertex:
        return self._vindex[vid]

    def edge(self, eid: str) -> Edge:
        return self._eindex[eid]

    def has_edge(self, eid: str) -> bool:
        return eid in self._eindex

    def circle(self, cid: str) -> Circle:
        for c in self.circles:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def weight(self, eid: str) -> Fraction:
        if eid in self._eindex:
            return self._eindex[eid].weight
        return self.circle(eid).weight

    def is_full(self, vid: str) -> bool:
        return self._vindex[vid].mark == FULL

    @cached_property
    def incidence(self) -> dict[str, tuple[HalfEdge, ...]]:
        """Half-edges at each vertex; a loop contributes both of its ends."""
        inc: dict[str, list[HalfEdge]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            inc[e.u].append(HalfEdge(e.id, 0))
            inc[e.v].append(HalfEdge(e.id, 1))
        return {k: tuple(v) for k, v in inc.items()}

    def valency(self, vid: str) -> int:
        return len(self.incidence[vid])

    def slot_weights(self, vid: str) -> tuple[Fraction, ...]:
        return tuple(self._eindex[h.edge].weight for h in self.incidence[vid])

    def full_vertices(self) -> list[str]:
        return [v.id for v in self.vertices if v.mark == FULL]

    def components(self) -> list[tuple[frozenset[str], frozenset[str]]]:
        """Connected components as (vertex ids, edge/circle ids), in deterministic order."""
        parent = {v.id: v.id for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(e.u), find(e.v)
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups: dict[str, tuple[set, set]] = {}
        for v in self.vertices:
            groups.setdefault(find(v.id), (set(), set()))[0].add(v.id)
        for e in self.edges:
            groups[find(e.u)][1].add(e.id)
        out = [(frozenset(vs), frozenset(es)) for _, (vs, es) in sorted(groups.items())]
        out.extend((frozenset(), frozenset([c.id])) for c in self.circles)
        return out

    def with_weights(self, weights: Mapping[str, object]) -> "LabeledGraph":
        """Copy with some edge or circle weights replaced."""
        es = [Edge(e.id, e.u, e.v, as_weight(weights.get(e.id, e.weight))) for e in self.edges]
        cs = [Circle(c.id, as_weight(weights.get(c.id, c.weight))) for c in self.circles]
        return LabeledGraph(self.vertices, tuple(es), tuple(cs), self.source)

    def with_marks(self, marks: Mapping[str, str]) -> "LabeledGraph":
        vs = [Vertex(v.id, marks.get(v.id, v.mark)) for v in self.vertices]
        return LabeledGraph(tuple(vs), self.edges, self.circles, self.source)

    def relabel(self, vmap: Mapping[str, str], emap: Mapping[str, str] | None = None) -> "LabeledGraph":
        emap = emap or {}
        vs = [Vertex(vmap.get(v.id, v.id), v.mark) for v in self.vertices]
        es = [Edge(emap.get(e.id, e.id), vmap.get(e.u, e.u), vmap.get(e.v, e.v), e.weight)
              for e in self.edges]
        cs = [Circle(emap.get(c.id, c.id), c.weight) for c in self.circles]
        return LabeledGraph(tuple(vs), tuple(es), tuple(cs), self.source)

    def __str__(self) -> str:
        return format_graph(self)


def _first_dup(items):
    seen = set()
    for x in items:
        if x in seen:
            return x
        seen.add(x)
    return None


def _check_weight(eid: str, w: Fraction, source: bool) -> None:
    if source:
        if w.denominator != 1:
            raise GraphError(f"weight of {eid} must be an integer, got {format_weight(w)}")
        if w < 2:
            raise GraphError(f"weight < 2 on {eid}")
    elif w <= 1:
        raise GraphError(f"derived weight of {eid} must exceed 1, got {format_weight(w)}")


def graph(vertices: Mapping[str, str] | Iterable, edges: Iterable = (), circles: Iterable = (),
          source: bool = True) -> LabeledGraph:
    """Convenience constructor: ``graph({"a": "full"}, [("e", "a", "a", 3)])``."""
    if isinstance(vertices, Mapping):
        vertices = [Vertex(k, m) for k, m in vertices.items()]
    return LabeledGraph(tuple(vertices), tuple(edges), tuple(circles), source)


# -- counting -----------------------------------------------------------------


@dataclass(frozen=True)
class CountProfile:
    V: int
    E: int
    b0: int
    C: int
    V0: int
    V1: int
    V2: int
    V3: int
    higher: int = 0  # vertices of valency > 3
    circles: int = 0

    @property
    def max_valency_ok(self) -> bool:
        return self.higher == 0


def profile(g: LabeledGraph) -> CountProfile:
    """Vertex/edge/component/cycle counts with valency histogram.

    Circles are components carrying one cycle and no vertex or edge; with that
    convention ``V - E + C = b0`` and the half-valency identity
    ``V0 + V1/2 - V3/2 + C = b0`` (valency <= 3) hold exactly.
    """
    V, E = len(g.vertices), len(g.edges)
    b0 = len(g.components())
    C = E - V + b0
    hist = Counter(g.valency(v.id) for v in g.vertices)
    higher = sum(n for val, n in hist.items() if val > 3)
    prof = CountProfile(V, E, b0, C, hist[0], hist[1], hist[2], hist[3], higher, len(g.circles))
    if C < 0 or V - E + C != b0:
        raise AssertionError(f"Euler identity failed: {prof}")
    half = sum(Fraction(2 - val, 2) * n for val, n in hist.items())
    if half + C != b0:
        raise AssertionError(f"valency identity failed: {prof}")
    if higher == 0 and Fraction(2 * hist[0] + hist[1] - hist[3], 2) + C != b0:
        raise AssertionError(f"valency identity failed: {prof}")
    return prof


# -- cycles -------------------------------------------------------------------


def simple_cycles(g: LabeledGraph) -> list[Cycle]:
    """Every vertex-simple cycle exactly once (loops have length 1, circles length 0 vertices)."""
    order = {v.id: i for i, v in enumerate(g.vertices)}
    found: dict[frozenset, Cycle] = {}

    for e in g.edges:
        if e.is_loop:
            found[frozenset([e.id])] = Cycle((HalfEdge(e.id, 0),), (e.u,))

    def leave(u: str):
        for h in g.incidence[u]:
            e = g.edge(h.edge)
            if not e.is_loop:
                yield h, e.end(1 - h.end)

    for s in g.vertices:
        s_id, s_idx = s.id, order[s.id]
        path_h: list[HalfEdge] = []
        path_v: list[str] = [s_id]
        on_path = {s_id}

        def dfs(u: str) -> None:
            for h, w in leave(u):
                if w == s_id:
                    if path_h and not (len(path_h) == 1 and path_h[0].edge == h.edge):
                        hs = tuple(path_h) + (h,)
                        key = frozenset(x.edge for x in hs)
                        if key not in found:
                            found[key] = Cycle(hs, tuple(path_v))
                elif w not in on_path and order[w] > s_idx:
                    path_h.append(h)
                    path_v.append(w)
                    on_path.add(w)
                    dfs(w)
                    path_h.pop()
                    path_v.pop()
                    on_path.discard(w)

        dfs(s_id)

    for c in g.circles:
        found[frozenset([c.id])] = Cycle((HalfEdge(c.id, 0),), ())
    return sorted(found.values(), key=lambda c: (len(c), c.key))


def has_cycle(g: LabeledGraph, allowed_vertices: set[str], min_weight: Fraction) -> list[str] | None:
    """Edge ids of some simple cycle inside ``allowed_vertices`` using edges of weight >= min_weight.

    Returns None when that subgraph is a forest.  Much cheaper than full cycle
    enumeration on large cover graphs.
    """
    parent: dict[str, str] = {}
    via: dict[str, str] = {}
    depth: dict[str, int] = {}
    used_edges: set[str] = set()
    adj: dict[str, list[Edge]] = {v: [] for v in allowed_vertices}
    for e in g.edges:
        if e.weight < min_weight or e.u not in allowed_vertices or e.v not in allowed_vertices:
            continue
        if e.is_loop:
            return [e.id]
        adj[e.u].append(e)
        adj[e.v].append(e)
    for root in sorted(allowed_vertices):
        if root in depth:
            continue
        depth[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for e in adj[u]:
                if e.id in used_edges:
                    continue
                used_edges.add(e.id)
                w = e.other(u)
                if w in depth:
                    # close the cycle u..lca..w plus e
                    a, b = u, w
                    left, right = [], []
                    while a != b:
                        if depth[a] >= depth[b]:
                            left.append(via[a])
                            a = parent[a]
                        else:
                            right.append(via[b])
                            b = parent[b]
                    return left + [e.id] + right[::-1]
                depth[w] = depth[u] + 1
                parent[w] = u
                via[w] = e.id
                stack.append(w)
    return None


def cycle_from_edges(g: LabeledGraph, edge_ids: Iterable[str]) -> Cycle:
    """Rebuild a Cycle from an unordered set of edge ids; raises GraphError if not simple."""
    ids = sorted(set(edge_ids))
    if not ids:
        raise GraphError("not a simple cycle: empty edge set")
    if len(ids) == 1 and not g.has_edge(ids[0]):
        try:
            g.circle(ids[0])
        except KeyError:
            raise GraphError(f"unknown edge {ids[0]}") from None
        return Cycle((HalfEdge(ids[0], 0),), ())
    for eid in ids:
        if not g.has_edge(eid):
            raise GraphError(f"unknown edge {eid}")
    edges = [g.edge(e) for e in ids]
    if len(edges) == 1:
        if not edges[0].is_loop:
            raise GraphError("not a simple cycle")
        return Cycle((HalfEdge(edges[0].id, 0),), (edges[0].u,))
    deg: Counter = Counter()
    for e in edges:
        if e.is_loop:
            raise GraphError("not a simple cycle")
        deg[e.u] += 1
        deg[e.v] += 1
    if any(d != 2 for d in deg.values()):
        raise GraphError("not a simple cycle")
    start = min(deg)
    hs, vs = [], []
    remaining = {e.id: e for e in edges}
    cur = start
    while remaining:
        nxt = sorted((e for e in remaining.values() if cur in (e.u, e.v)), key=lambda e: e.id)
        if not nxt:
            raise GraphError("not a simple cycle")
        e = nxt[0]
        del remaining[e.id]
        hs.append(HalfEdge(e.id, 0 if e.u == cur else 1))
        vs.append(cur)
        cur = e.other(cur)
    if cur != start or len(vs) != len(set(vs)):
        raise GraphError("not a simple cycle")
    return Cycle(tuple(hs), tuple(vs))


# -- canonical form -------------------------------------------------------------


class CanonicalFormTooLarge(RuntimeError):
    pass


def _refined_classes(g: LabeledGraph, labels: Mapping[str, object]) -> list[int]:
    """Isomorphism-invariant vertex colouring by iterated neighbourhood refinement."""
    vids = [v.id for v in g.vertices]
    pos = {v: i for i, v in enumerate(vids)}
    n = len(vids)
    loops: list[list[Fraction]] = [[] for _ in range(n)]
    nbr: list[dict[int, list[Fraction]]] = [dict() for _ in range(n)]
    for e in g.edges:
        i, j = pos[e.u], pos[e.v]
        if i == j:
            loops[i].append(e.weight)
        else:
            nbr[i].setdefault(j, []).append(e.weight)
            nbr[j].setdefault(i, []).append(e.weight)
    inv = [(g.vertices[i].mark, str(labels.get(vids[i], "")), tuple(sorted(loops[i])),
            tuple(sorted(w for ws in nbr[i].values() for w in ws))) for i in range(n)]
    ranks = _rank(inv)
    while True:
        sig = [(ranks[i], tuple(sorted((ranks[j], tuple(sorted(ws))) for j, ws in nbr[i].items())))
               for i in range(n)]
        new = _rank(sig)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _rank(values: list) -> list[int]:
    uniq = sorted(set(values))
    idx = {v: i for i, v in enumerate(uniq)}
    return [idx[v] for v in values]


def _cell(ws: list[Fraction]) -> str:
    return ",".join(format_weight(w) for w in sorted(ws))


def canonical_form(g: LabeledGraph, labels: Mapping[str, object] | None = None,
                   limit: int = 2_000_000) -> bytes:
    """Byte string equal for two graphs iff they are isomorphic.

    Isomorphisms must preserve marks, weights (and ``labels`` when given).
    Vertices are first split into invariant classes; the remaining freedom is
    searched exhaustively.  Raises CanonicalFormTooLarge above ``limit``
    candidate orderings.
    """
    labels = labels or {}
    n = len(g.vertices)
    vids = [v.id for v in g.vertices]
    pos = {v: i for i, v in enumerate(vids)}
    classes = _refined_classes(g, labels) if n else []
    by_class: dict[int, list[int]] = {}
    for i, c in enumerate(classes):
        by_class.setdefault(c, []).append(i)
    groups = [by_class[c] for c in sorted(by_class)]
    total = math.prod(math.factorial(len(grp)) for grp in groups)
    if total > limit:
        raise CanonicalFormTooLarge(f"{total} orderings exceed limit {limit}")

    cells: dict[tuple[int, int], list[Fraction]] = {}
    for e in g.edges:
        i, j = sorted((pos[e.u], pos[e.v]))
        cells.setdefault((i, j), []).append(e.weight)
    off_values = sorted({_cell(ws) for (i, j), ws in cells.items() if i != j} | {""})
    code_of = {s: k for k, s in enumerate(off_values)}
    codes = np.zeros((n, n), dtype=np.int64)
    for (i, j), ws in cells.items():
        if i != j:
            codes[i, j] = codes[j, i] = code_of[_cell(ws)]
    # diagonal: vertex class rank already encodes mark, label and loops
    for i in range(n):
        codes[i, i] = classes[i]

    if total == 1:
        best = [x for grp in groups for x in grp]
    else:
        per_group = [list(itertools.permutations(grp)) for grp in groups]
        perms = np.array([[x for part in combo for x in part]
                          for combo in itertools.product(*per_group)], dtype=np.int64)
        best = list(perms[_kernels.lexmin_permutation(codes, perms)])

    parts = [f"V{n}"]
    for i in best:
        v = g.vertices[i]
        loop_ws = cells.get((i, i), [])
        lab = labels.get(v.id)
        parts.append(f"{v.mark[0]}{'' if lab is None else '[' + str(lab) + ']'}({_cell(loop_ws)})")
    upper = []
    for a in range(n):
        for b in range(a + 1, n):
            i, j = sorted((best[a], best[b]))
            upper.append(_cell(cells.get((i, j), [])))
    parts.append("|".join(upper))
    parts.append("O" + _cell([c.weight for c in g.circles]))
    return ";".join(parts).encode("ascii")


def is_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    return canonical_form(g1) == canonical_form(g2)


# -- text format ----------------------------------------------------------------


def parse_graph(text: str, source: bool = True) -> LabeledGraph:
    """Parse the line-oriented graph format; errors carry 1-based line numbers."""
    vertices: list[Vertex] = []
    edges: list[Edge] = []
    circles: list[Circle] = []
    vseen: dict[str, int] = {}
    eseen: dict[str, int] = {}
    pending: list[tuple[int, Edge]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "vertex":
            if len(tok) != 3:
                raise GraphSyntaxError("expected 'vertex <id> full|hollow'", lineno)
            if tok[2] not in MARKS:
                raise GraphSyntaxError(f"unknown marking {tok[2]!r}", lineno)
            if tok[1] in vseen:
                raise GraphSyntaxError(f"duplicate vertex id {tok[1]!r}", lineno)
            vseen[tok[1]] = lineno
            vertices.append(Vertex(tok[1], tok[2]))
        elif kind in ("edge", "circle"):
            want = 5 if kind == "edge" else 3
            if len(tok) != want:
                usage = "edge <id> <v1> <v2> <weight>" if kind == "edge" else "circle <id> <weight>"
                raise GraphSyntaxError(f"expected '{usage}'", lineno)
            eid = tok[1]
            if eid in eseen:
                raise GraphSyntaxError(f"duplicate edge id {eid!r}", lineno)
            eseen[eid] = lineno
            w = _parse_weight(tok[-1], lineno)
            try:
                _check_weight(eid, w, source)
            except GraphError as exc:
                raise GraphSyntaxError(str(exc), lineno) from None
            if kind == "edge":
                e = Edge(eid, tok[2], tok[3], w)
                edges.append(e)
                pending.append((lineno, e))
            else:
                circles.append(Circle(eid, w))
        else:
            raise GraphSyntaxError(f"unknown directive {kind!r}", lineno)
    for lineno, e in pending:
        for x in (e.u, e.v):
            if x not in vseen:
                raise GraphSyntaxError(f"dangling endpoint {x!r} in edge {e.id}", lineno)
    return LabeledGraph(tuple(vertices), tuple(edges), tuple(circles), source)


def _parse_weight(tok: str, lineno: int) -> Fraction:
    try:
        num, _, den = tok.partition("/")
        w = Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise GraphSyntaxError(f"bad weight {tok!r}", lineno) from None
    return w


def format_graph(g: LabeledGraph) -> str:
    lines = [f"vertex {v.id} {v.mark}" for v in g.vertices]
    lines += [f"edge {e.id} {e.u} {e.v} {format_weight(e.weight)}" for e in g.edges]
    lines += [f"circle {c.id} {format_weight(c.weight)}" for c in g.circles]
    return "\n".join(lines) + "\n"
