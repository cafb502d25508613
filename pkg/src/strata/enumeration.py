"""Exhaustive generation of candidate source graphs and the admissibility sweep.

Generation runs shapes, then markings, then weights, deduplicating by
canonical form at every stage.  Three prunings are applied while generating;
each discards only graphs that the rule engine rejects regardless of the
remaining choices:

* valency above 3 (ValencyBound),
* hollow vertices of valency below 3 and trivalent vertices whose weights are
  not a spherical triple (NoLocalModel),
* graphs without a full vertex (skipped by precondition, not excluded).

Vertex-free circles are not generated: a circle component never contains a
full vertex, so every such graph is excluded.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .graph import FULL, HOLLOW, LabeledGraph, canonical_form, graph, profile
from .groups import valid_triple
from .rules import COVER_DEPTH, Verdict, check


@dataclass(frozen=True)
class Bounds:
    max_vertices: int = 4
    max_edges: int = 6
    max_weight: int = 7
    max_cycles: int = 3

    def __post_init__(self):
        if self.max_vertices < 1 or self.max_edges < 0 or self.max_weight < 2 or self.max_cycles < 0:
            raise ValueError(f"invalid bounds {self}")


def thread_count() -> int:
    raw = os.environ.get("STRATA_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"STRATA_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _shape_matrices(n: int, max_edges: int):
    """Symmetric multiplicity matrices (loops on the diagonal) with valency <= 3."""
    cells = [(i, j) for i in range(n) for j in range(i, n)]
    deg = [0] * n
    mult = {}

    def rec(idx: int, edges: int):
        if idx == len(cells):
            yield dict(mult)
            return
        i, j = cells[idx]
        top = 1 if i == j else 3
        for m in range(top + 1):
            add = 2 * m if i == j else m
            if edges + m > max_edges or deg[i] + add > 3 or (i != j and deg[j] + add > 3):
                break
            deg[i] += add
            if i != j:
                deg[j] += add
            mult[(i, j)] = m
            yield from rec(idx + 1, edges + m)
            deg[i] -= add
            if i != j:
                deg[j] -= add
        mult.pop((i, j), None)

    yield from rec(0, 0)


def shapes(bounds: Bounds) -> list[LabeledGraph]:
    """Unmarked shapes (all vertices full, weights 2) up to isomorphism, valency <= 3."""
    out: dict[bytes, LabeledGraph] = {}
    for n in range(1, bounds.max_vertices + 1):
        for mult in _shape_matrices(n, bounds.max_edges):
            es = []
            for (i, j), m in sorted(mult.items()):
                for _ in range(m):
                    es.append((f"e{len(es)}", f"v{i}", f"v{j}", 2))
            g = graph({f"v{i}": FULL for i in range(n)}, es)
            if profile(g).C > bounds.max_cycles:
                continue
            out.setdefault(canonical_form(g), g)
    return [out[k] for k in sorted(out)]


def marked_shapes(bounds: Bounds) -> list[LabeledGraph]:
    out: dict[bytes, LabeledGraph] = {}
    for s in shapes(bounds):
        tri = [v.id for v in s.vertices if s.valency(v.id) == 3]
        for r in range(len(tri) + 1):
            for hollow in itertools.combinations(tri, r):
                if len(hollow) == len(s.vertices):
                    continue  # no full vertex
                g = s.with_marks({v: HOLLOW for v in hollow})
                out.setdefault(canonical_form(g), g)
    return [out[k] for k in sorted(out)]


def weightings(shape: LabeledGraph, max_weight: int) -> Iterator[LabeledGraph]:
    """All weightings of a marked shape with spherical triples at trivalent vertices.

    Not deduplicated; the caller merges isomorphic results.
    """
    edges = list(shape.edges)
    # order edges so each trivalent vertex is completed as early as possible
    last_edge: dict[str, int] = {}
    for idx, e in enumerate(edges):
        last_edge[e.u] = idx
        last_edge[e.v] = idx
    check_at: dict[int, list[str]] = {}
    for v in shape.vertices:
        if shape.valency(v.id) == 3:
            check_at.setdefault(last_edge[v.id], []).append(v.id)
    weights = [0] * len(edges)
    eidx = {e.id: i for i, e in enumerate(edges)}

    def rec(i: int):
        if i == len(edges):
            yield shape.with_weights({e.id: weights[j] for j, e in enumerate(edges)})
            return
        for w in range(2, max_weight + 1):
            weights[i] = w
            ok = True
            for vid in check_at.get(i, ()):
                ws = [weights[eidx[h.edge]] for h in shape.incidence[vid]]
                if not valid_triple(ws):
                    ok = False
                    break
            if ok:
                yield from rec(i + 1)

    yield from rec(0)


def candidates_for_shape(shape: LabeledGraph, max_weight: int) -> dict[bytes, LabeledGraph]:
    out: dict[bytes, LabeledGraph] = {}
    for g in weightings(shape, max_weight):
        out.setdefault(canonical_form(g), g)
    return out


def candidates(bounds: Bounds = Bounds()) -> dict[bytes, LabeledGraph]:
    """Every non-isomorphic candidate within bounds, keyed by canonical form."""
    out: dict[bytes, LabeledGraph] = {}
    for s in marked_shapes(bounds):
        for k, g in candidates_for_shape(s, bounds.max_weight).items():
            out.setdefault(k, g)
    return out


def _sweep_shape(args) -> list[tuple[bytes, LabeledGraph, Verdict]]:
    shape, max_weight, depth = args
    return [(k, g, check(g, cover_depth=depth))
            for k, g in sorted(candidates_for_shape(shape, max_weight).items())]


@dataclass(frozen=True)
class SweepResult:
    admissible: tuple[LabeledGraph, ...]
    checked: int
    excluded_by_rule: dict[str, int]


def sweep(bounds: Bounds = Bounds(), threads: int | None = None,
          cover_depth: int = COVER_DEPTH) -> SweepResult:
    """Check every candidate; admissible graphs come back sorted by canonical form."""
    threads = thread_count() if threads is None else max(1, threads)
    jobs = [(s, bounds.max_weight, cover_depth) for s in marked_shapes(bounds)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(_sweep_shape, jobs))
    else:
        parts = [_sweep_shape(j) for j in jobs]
    merged: dict[bytes, tuple[LabeledGraph, Verdict]] = {}
    for part in parts:
        for k, g, v in part:
            merged.setdefault(k, (g, v))
    rules: dict[str, int] = {}
    admissible = []
    for k in sorted(merged):
        g, v = merged[k]
        if v.admissible:
            admissible.append(g)
        else:
            rules[v.rule] = rules.get(v.rule, 0) + 1
    return SweepResult(tuple(admissible), len(merged), rules)


def enumerate_graphs(bounds: Bounds = Bounds(), threads: int | None = None,
                     cover_depth: int = COVER_DEPTH) -> list[LabeledGraph]:
    """Admissible source graphs within bounds, deduplicated, sorted by canonical form."""
    return list(sweep(bounds, threads, cover_depth).admissible)
