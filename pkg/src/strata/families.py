"""The eighteen admissible graph families, as parametric templates.

Each template fixes the shape and markings; edge weights are either fixed
integers or named free variables.  An instantiation belongs to the family when
every vertex admits a local model (trivalent vertices need a spherical triple).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .graph import FULL, HOLLOW, LabeledGraph, canonical_form, graph
from .groups import models_for

F, H = FULL, HOLLOW


@dataclass(frozen=True)
class FamilyPattern:
    id: int
    vertices: tuple[tuple[str, str], ...]
    edges: tuple[tuple[str, str, str, int | str], ...]
    constraint: str = ""

    @property
    def variables(self) -> tuple[str, ...]:
        seen = []
        for *_, w in self.edges:
            if isinstance(w, str) and w not in seen:
                seen.append(w)
        return tuple(seen)

    def instantiate(self, values: dict[str, int]) -> LabeledGraph:
        es = [(eid, u, v, values[w] if isinstance(w, str) else w) for eid, u, v, w in self.edges]
        return graph(dict(self.vertices), es)

    def instances(self, max_weight: int) -> Iterator[tuple[dict[str, int], LabeledGraph]]:
        """Instantiations with weights in 2..max_weight where every vertex has a model."""
        names = self.variables
        for combo in itertools.product(range(2, max_weight + 1), repeat=len(names)):
            values = dict(zip(names, combo))
            g = self.instantiate(values)
            if all(models_for(v.mark, g.slot_weights(v.id)) for v in g.vertices):
                yield values, g

    def describe(self) -> str:
        es = ", ".join(f"{u}-{v}:{w}" for _, u, v, w in self.edges) or "no edges"
        vs = " ".join(f"{vid}({m[0]})" for vid, m in self.vertices)
        tail = f"  [{self.constraint}]" if self.constraint else ""
        return f"{self.id:>2}: {vs}; {es}{tail}"


FAMILIES: tuple[FamilyPattern, ...] = (
    FamilyPattern(1, (("a", F),), ()),
    FamilyPattern(2, (("a", F), ("b", F)), ()),
    FamilyPattern(3, (("a", F), ("b", F), ("c", F)), ()),
    FamilyPattern(4, (("a", F), ("b", F)), (("e1", "a", "b", "k"),)),
    FamilyPattern(5, (("a", F), ("b", F), ("c", F)), (("e1", "a", "b", "k"), ("e2", "b", "c", "l"))),
    FamilyPattern(6, (("h", H), ("x", F), ("y", F), ("z", F)),
                  (("e1", "h", "x", 2), ("e2", "h", "y", 2), ("e3", "h", "z", "k")),
                  "(2,2,k) at h"),
    FamilyPattern(7, (("a", F),), (("e1", "a", "a", "k"),)),
    FamilyPattern(8, (("a", F), ("b", F)), (("e1", "a", "b", "k"), ("e2", "a", "b", "l"))),
    FamilyPattern(9, (("a", F), ("b", F), ("c", F)),
                  (("e1", "a", "b", "k"), ("e2", "b", "c", "q"), ("e3", "c", "a", "l"))),
    FamilyPattern(10, (("a", F), ("b", F)), (("e1", "a", "a", 2), ("e2", "a", "b", "k")),
                  "(2,2,k) at a"),
    FamilyPattern(11, (("h", H), ("f", F), ("g", F)),
                  (("e1", "h", "f", 2), ("e2", "h", "f", "k"), ("e3", "h", "g", "l")),
                  "(2,k,l) spherical at h"),
    FamilyPattern(12, (("h", H), ("f", F)),
                  (("e1", "h", "f", 2), ("e2", "h", "f", "l"), ("e3", "h", "f", "k")),
                  "(2,l,k) spherical"),
    FamilyPattern(13, (("a", F), ("b", F)),
                  (("e1", "a", "b", 2), ("e2", "a", "b", "l"), ("e3", "a", "b", "k")),
                  "(2,l,k) spherical"),
    FamilyPattern(14, (("L", H), ("R", H), ("f", F)),
                  (("e1", "L", "R", "r"), ("e2", "L", "R", "q"), ("e3", "L", "f", "k"),
                   ("e4", "R", "f", "l")),
                  "(r,q,k) and (r,q,l) spherical"),
    FamilyPattern(15, (("L", H), ("R", F), ("f", F)),
                  (("e1", "L", "R", 2), ("e2", "L", "R", "q"), ("e3", "L", "f", "k"),
                   ("e4", "R", "f", "l")),
                  "(2,q,k) and (2,q,l) spherical"),
    FamilyPattern(16, (("T", F), ("A", H), ("B", H), ("M", H)),
                  (("e1", "T", "A", 2), ("e2", "T", "B", "l"), ("e3", "T", "M", "k"),
                   ("e4", "A", "B", "s"), ("e5", "A", "M", "q"), ("e6", "B", "M", "r")),
                  "all four triples spherical"),
    FamilyPattern(17, (("a", F), ("b", F), ("c", F)), (("e1", "a", "b", "k"),)),
    FamilyPattern(18, (("a", F), ("c", F)), (("e1", "a", "a", 2),)),
)

FAMILY_BY_ID = {f.id: f for f in FAMILIES}


@lru_cache(maxsize=8)
def family_index(max_weight: int = 7) -> dict[bytes, tuple[tuple[int, tuple[tuple[str, int], ...]], ...]]:
    """Canonical form -> ((family id, sorted variable values), ...) for all in-range instances."""
    idx: dict[bytes, list] = {}
    for fam in FAMILIES:
        for values, g in fam.instances(max_weight):
            idx.setdefault(canonical_form(g), []).append((fam.id, tuple(sorted(values.items()))))
    return {k: tuple(v) for k, v in idx.items()}


def match_graph(g: LabeledGraph, max_weight: int = 7):
    """Family memberships of ``g`` (possibly several), empty tuple if none."""
    bound = max([max_weight] + [int(e.weight) for e in g.edges])
    return family_index(bound).get(canonical_form(g), ())


@dataclass(frozen=True)
class FamilyReport:
    matches: tuple[tuple[LabeledGraph, tuple], ...]
    hits: dict[int, int]
    unmatched: tuple[LabeledGraph, ...]
    empty_families: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.unmatched and not self.empty_families


def match_families(graphs, patterns=FAMILIES, max_weight: int = 7, max_vertices: int | None = None,
                   max_edges: int | None = None) -> FamilyReport:
    """Map graphs to families; report UNMATCHED graphs and families never hit.

    A family only counts as empty when it has an instance within the bounds.
    ``hits`` counts graphs, not (graph, parameter) pairs.
    """
    idx: dict[bytes, list] = {}
    reachable = set()
    for fam in patterns:
        if max_vertices is not None and len(fam.vertices) > max_vertices:
            continue
        if max_edges is not None and len(fam.edges) > max_edges:
            continue
        for values, g in fam.instances(max_weight):
            reachable.add(fam.id)
            idx.setdefault(canonical_form(g), []).append((fam.id, tuple(sorted(values.items()))))
    matches, unmatched = [], []
    hits = {fam.id: 0 for fam in patterns}
    for g in graphs:
        found = tuple(idx.get(canonical_form(g), ()))
        matches.append((g, found))
        if not found:
            unmatched.append(g)
        for fid in {fid for fid, _ in found}:
            hits[fid] += 1
    empty = tuple(sorted(fid for fid in reachable if hits[fid] == 0))
    return FamilyReport(tuple(matches), hits, tuple(unmatched), empty)
