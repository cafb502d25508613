"""Admissibility of labeled graphs: seven necessary conditions with replayable certificates.

Rule ids and what they check:

=====  ======================  ==================================================
R1     ValencyBound            every vertex has valency <= 3
R2     NoLocalModel            every vertex matches a local model template
R3     SmallPointBound         at most three small points in the graph itself
R4     AllOrbifoldGeodesic     no closed singular geodesic avoiding full vertices
R5     CoverSmallPointBound    no cover plan (depth <= 3, k in {2,3}) reaches > 3
R6     DisjointCycles          no two vertex-disjoint cycles
R7     KnotRule                knotted singular cycle vs. small points of covers
=====  ======================  ==================================================

R6 is checked before R5 by default so that disjoint cycles get their own,
more readable certificate; the outcome does not depend on the order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .covers import CoverError, branched_cover, iterate_covers, small_count
from .graph import (
    CanonicalFormTooLarge,
    GraphError,
    HalfEdge,
    LabeledGraph,
    canonical_form,
    cycle_from_edges,
    format_weight,
    has_cycle,
    simple_cycles,
)
from .groups import LocalModel, ValencyError, models_for, slot_assignments

CERT_FORMAT = "strata-certificate/1"

RULES = {
    "R1": "ValencyBound",
    "R2": "NoLocalModel",
    "R3": "SmallPointBound",
    "R4": "AllOrbifoldGeodesic",
    "R5": "CoverSmallPointBound",
    "R6": "DisjointCycles",
    "R7": "KnotRule",
}
RULE_CODE = {v: k for k, v in RULES.items()}
DEFAULT_ORDER = ("R1", "R2", "R3", "R4", "R6", "R5", "R7")

MAX_SMALL = 3
COVER_DEPTH = 3
COVER_DEGREES = (2, 3)

# order of pi_1 of the k-fold cyclic branched cover of S^3 along the knot
KNOT_PI1 = {"unknot": {2: 1, 3: 1}, "trefoil": {2: 3, 3: 8}}


class PreconditionError(ValueError):
    pass


class KnotError(ValueError):
    pass


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class Certificate:
    rule: str
    witness: Mapping

    def to_dict(self) -> dict:
        return {"format": CERT_FORMAT, "rule": self.rule, "witness": self.witness}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> "Certificate":
        if d.get("format") != CERT_FORMAT:
            raise CertificateError(f"unsupported certificate format {d.get('format')!r}")
        if d.get("rule") not in RULE_CODE:
            raise CertificateError(f"unknown rule {d.get('rule')!r}")
        return cls(d["rule"], d["witness"])

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Verdict:
    admissible: bool
    models: Mapping[str, LocalModel] | None = None
    certificate: Certificate | None = None

    @property
    def rule(self) -> str | None:
        return None if self.certificate is None else self.certificate.rule


@dataclass(frozen=True)
class Replay:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


# -- model assignments ----------------------------------------------------------


@dataclass(frozen=True)
class Assignment:
    models: Mapping[str, LocalModel]
    # vertex -> set of pairs of actual half-edges exchanged by the involution
    pairs: Mapping[str, frozenset]

    @property
    def small(self) -> frozenset[str]:
        return frozenset(v for v, m in self.models.items() if m.small)


def _vertex_options(g: LabeledGraph, vid: str) -> list[tuple[LocalModel, frozenset]]:
    hs = g.incidence[vid]
    ws = [g.edge(h.edge).weight for h in hs]
    out = []
    seen = set()
    for model in models_for(g.vertex(vid).mark, ws):
        for tmpl in slot_assignments([int(w) for w in ws]):
            rel = frozenset(frozenset((hs[i], hs[j]))
                            for i, j in itertools.product(range(len(hs)), repeat=2)
                            if (min(tmpl[i], tmpl[j]), max(tmpl[i], tmpl[j])) in model.continuation)
            if (model, rel) not in seen:
                seen.add((model, rel))
                out.append((model, rel))
    return out


def model_options(g: LabeledGraph) -> dict[str, list[tuple[LocalModel, frozenset]]] | None:
    """Per-vertex (model, slot relation) options; None if some vertex exceeds valency 3."""
    try:
        return {v.id: _vertex_options(g, v.id) for v in g.vertices}
    except ValencyError:
        return None


def assignments(g: LabeledGraph) -> list[Assignment]:
    opts = model_options(g)
    if opts is None or any(not o for o in opts.values()):
        return []
    vids = sorted(opts)
    out = []
    for combo in itertools.product(*(opts[v] for v in vids)):
        out.append(Assignment({v: m for v, (m, _) in zip(vids, combo)},
                              {v: r for v, (_, r) in zip(vids, combo)}))
    return out


def small_points(g: LabeledGraph) -> frozenset[str] | None:
    """Small vertices of a source graph (independent of the model choice), None if undefined."""
    asg = assignments(g)
    return asg[0].small if asg else None


# -- R1 .. R3 -------------------------------------------------------------------


def _r1(g, asg, ctx):
    for v in g.vertices:
        n = g.valency(v.id)
        if n > 3:
            return {"vertex": v.id, "valency": n}
    return None


def _r2(g, asg, ctx):
    opts = ctx.get("options")
    if opts is None:
        return None
    for v in g.vertices:
        if not opts[v.id]:
            return {"vertex": v.id, "mark": v.mark,
                    "weights": sorted(format_weight(w) for w in g.slot_weights(v.id))}
    return None


def _r3(g, asg, ctx):
    if asg is None:
        return None
    small = sorted(asg.small)
    if len(small) > MAX_SMALL:
        return {"small": small, "count": len(small)}
    return None


# -- R4 -------------------------------------------------------------------------


def _transitions(g: LabeledGraph, asg: Assignment) -> dict[HalfEdge, list[HalfEdge]]:
    """Directed transitions between traversal states.

    A state is the half-edge a walk leaves along.  After crossing the edge the
    walk arrives at the far half-edge; at a hollow vertex it continues along
    the half-edge paired with the arrival slot by the involution.  A
    self-paired slot sends the walk back along the edge it came in on.  Full
    vertices end the walk.
    """
    trans: dict[HalfEdge, list[HalfEdge]] = {}
    for e in g.edges:
        for end in (0, 1):
            h = HalfEdge(e.id, end)
            arrive = HalfEdge(e.id, 1 - end)
            w = e.end(1 - end)
            nxt = []
            if not g.is_full(w):
                for pair in asg.pairs.get(w, ()):
                    if arrive in pair:
                        rest = pair - {arrive}
                        nxt.append(next(iter(rest)) if rest else arrive)
            trans[h] = sorted(nxt)
    return trans


def _find_closed_walk(trans: Mapping[HalfEdge, list[HalfEdge]]) -> list[HalfEdge] | None:
    color: dict[HalfEdge, int] = {}
    for start in sorted(trans):
        if start in color:
            continue
        stack = [(start, iter(trans[start]))]
        path = [start]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            c = color.get(nxt, 0)
            if c == 1:
                return path[path.index(nxt):]
            if c == 0:
                color[nxt] = 1
                stack.append((nxt, iter(trans[nxt])))
                path.append(nxt)
    return None


def _r4(g, asg, ctx):
    for vs, es in g.components():
        if not any(g.is_full(v) for v in vs):
            return {"component": {"vertices": sorted(vs), "edges": sorted(es)}}
    if asg is None:
        return None
    walk = _find_closed_walk(_transitions(g, asg))
    if walk is not None:
        return {"walk": [[h.edge, h.end] for h in walk]}
    return None


# -- R5 -------------------------------------------------------------------------


def _step_value(g: LabeledGraph, small: frozenset[str], on: Iterable[str], k: int) -> int:
    on = set(on)
    return k * sum(1 for v in small if v not in on) + sum(1 for v in on if g.is_full(v))


def best_single_cover(g: LabeledGraph, small: frozenset[str], ks=COVER_DEGREES):
    """Some (edge ids, k, count) maximizing the small count of one more cover, or None.

    Including a small vertex on the cycle never helps (it loses k copies and
    gains at most 1), so it is enough to look, for every subset B of small
    points, for any cycle avoiding the other small points.
    """
    best = None
    non_small = {v.id for v in g.vertices} - small
    small_sorted = sorted(small)
    for k in ks:
        for c in g.circles:
            if c.weight >= k:
                cand = ([c.id], k, k * len(small))
                if best is None or cand[2] > best[2]:
                    best = cand
        for r in range(len(small_sorted) + 1):
            for B in itertools.combinations(small_sorted, r):
                cyc = has_cycle(g, non_small | set(B), Fraction(k))
                if cyc is None:
                    continue
                on = set()
                for eid in cyc:
                    e = g.edge(eid)
                    on.update((e.u, e.v))
                val = _step_value(g, small, on, k)
                if best is None or val > best[2]:
                    best = (sorted(cyc), k, val)
            if best is not None and best[1] == k and best[2] == k * len(small):
                break
    return best


def _state_key(g: LabeledGraph, small: frozenset[str]):
    try:
        return canonical_form(g, {v: "s" for v in small}, limit=20_000)
    except CanonicalFormTooLarge:
        return None


def cover_search(g: LabeledGraph, small: frozenset[str], depth: int = COVER_DEPTH,
                 ks: Sequence[int] = COVER_DEGREES):
    """Breadth-first search for a cover plan whose small count exceeds three.

    Returns (plan, totals) with plan a list of (sorted edge ids, k), or None.
    Branches are visited in (cycle edge ids, k) order so results are deterministic.
    """
    kmax = max(ks)
    level = [(g, small, [], [])]
    seen = set()
    for d in range(depth):
        nxt_level = []
        for cur, cur_small, plan, totals in level:
            if not cur_small:
                continue
            hit = best_single_cover(cur, cur_small, ks)
            if hit is not None and hit[2] > MAX_SMALL:
                return plan + [(hit[0], hit[1])], totals + [hit[2]]
            remaining = depth - d - 1
            if remaining == 0:
                continue
            for cyc in simple_cycles(cur):
                wmin = min(cur.weight(e) for e in cyc.edges)
                for k in ks:
                    if k > wmin:
                        continue
                    step = branched_cover(cur, cyc, k)
                    sc = small_count(step, cur_small)
                    if sc.total * kmax ** remaining <= MAX_SMALL:
                        continue
                    key = _state_key(step.result, sc.small_after)
                    if key is not None:
                        if key in seen:
                            continue
                        seen.add(key)
                    nxt_level.append((step.result, sc.small_after,
                                      plan + [(list(cyc.key), k)], totals + [sc.total]))
        level = nxt_level
        if not level:
            break
    return None


def _r5(g, asg, ctx):
    if asg is None:
        return None
    found = cover_search(g, asg.small, ctx.get("cover_depth", COVER_DEPTH))
    if found is None:
        return None
    plan, totals = found
    trace = iterate_covers(g, plan, asg.small)
    return {
        "plan": [{"cycle": list(c), "k": k} for c, k in plan],
        "trace": list(trace.totals),
        "hollow_on_cycle": [list(c.hollow_on_cycle) for c in trace.counts],
    }


# -- R6 -------------------------------------------------------------------------


def disjoint_cycles(g: LabeledGraph):
    cycles = simple_cycles(g)
    for a, b in itertools.combinations(cycles, 2):
        if not set(a.vertices) & set(b.vertices):
            return a, b
    return None


def _r6(g, asg, ctx):
    pair = disjoint_cycles(g)
    if pair is None:
        return None
    return {"cycles": [list(pair[0].key), list(pair[1].key)]}


# -- R7 -------------------------------------------------------------------------


def _normalize_knots(g: LabeledGraph, knot_data) -> dict[tuple[str, ...], str]:
    out = {}
    for cyc, name in (knot_data or {}).items():
        if name not in KNOT_PI1:
            raise KnotError(f"unsupported knot name {name!r}")
        ids = (cyc,) if isinstance(cyc, str) else tuple(cyc)
        out[tuple(sorted(ids))] = name
    return out


def _knot_violation(g: LabeledGraph, small: frozenset[str], cycle_ids, knot: str):
    cyc = cycle_from_edges(g, cycle_ids)
    wmin = min(g.weight(e) for e in cyc.edges)
    for k in COVER_DEGREES:
        if k > wmin:
            continue
        sc = small_count(branched_cover(g, cyc, k), small)
        order = KNOT_PI1[knot][k]
        if sc.total * order > MAX_SMALL:
            return {"cycle": list(cyc.key), "knot": knot, "k": k, "cover_small": sc.total,
                    "pi1_order": order, "count": sc.total * order}
    return None


def _r7(g, asg, ctx):
    knots = ctx.get("knots")
    if not knots or asg is None:
        return None
    for ids, name in sorted(knots.items()):
        w = _knot_violation(g, asg.small, ids, name)
        if w is not None:
            return w
    return None


_RULE_FN = {"R1": _r1, "R2": _r2, "R3": _r3, "R4": _r4, "R5": _r5, "R6": _r6, "R7": _r7}


def check(g: LabeledGraph, knot_data: Mapping | None = None,
          order: Sequence[str] = DEFAULT_ORDER, cover_depth: int = COVER_DEPTH) -> Verdict:
    """Admissible with a model assignment, or Excluded with one certificate.

    ``knot_data`` maps a cycle (edge ids) to ``"unknot"`` or ``"trefoil"`` and
    is only meaningful when the graph has exactly one cycle.  ``cover_depth``
    bounds the length of cover plans tried by R5.
    """
    if not g.source:
        raise PreconditionError("check needs a source graph (integer weights >= 2)")
    if not g.vertices and not g.circles:
        raise PreconditionError("precondition violated: empty graph")
    if sorted(order) != sorted(RULES):
        raise ValueError(f"rule order must be a permutation of {sorted(RULES)}")
    knots = _normalize_knots(g, knot_data)
    if knots:
        cycles = simple_cycles(g)
        if len(cycles) != 1:
            raise KnotError("knot data requires a graph with exactly one cycle")
        for ids in knots:
            if tuple(ids) != cycles[0].key:
                raise KnotError(f"knot data names {list(ids)}, which is not the cycle of the graph")
    if cover_depth < 0:
        raise ValueError("cover depth must be >= 0")
    ctx = {"options": model_options(g), "knots": knots, "cover_depth": cover_depth}
    asgs = assignments(g)
    first_fail = None
    for asg in asgs or [None]:
        cert = None
        for code in order:
            w = _RULE_FN[code](g, asg, ctx)
            if w is not None:
                cert = Certificate(RULES[code], w)
                break
        if cert is None:
            if asg is None:  # unreachable: R1/R2 fire whenever no assignment exists
                raise AssertionError("graph without model assignment passed all rules")
            return Verdict(True, dict(asg.models))
        first_fail = first_fail or cert
    return Verdict(False, None, first_fail)


# -- replay ---------------------------------------------------------------------


def replay(g: LabeledGraph, cert: Certificate | Mapping | str) -> Replay:
    """Re-derive the violation recorded in ``cert`` directly from ``g``."""
    if isinstance(cert, str):
        cert = Certificate.from_json(cert)
    elif not isinstance(cert, Certificate):
        cert = Certificate.from_dict(cert)
    w = cert.witness
    try:
        return _REPLAY[RULE_CODE[cert.rule]](g, w)
    except (KeyError, TypeError) as exc:
        raise CertificateError(f"certificate does not fit graph: {exc!r}") from None


def _replay_r1(g, w):
    v = w["vertex"]
    n = g.valency(v)
    return Replay(n > 3 and n == w["valency"], f"vertex {v} has valency {n}")


def _replay_r2(g, w):
    v = w["vertex"]
    try:
        opts = _vertex_options(g, v)
    except ValencyError:
        return Replay(False, f"vertex {v} exceeds valency 3")
    return Replay(not opts, f"vertex {v} has {len(opts)} model options")


def _replay_r3(g, w):
    small = small_points(g)
    if small is None:
        return Replay(False, "no model assignment")
    ok = len(small) > MAX_SMALL and sorted(small) == sorted(w["small"])
    return Replay(ok, f"{len(small)} small points")


def _replay_r4(g, w):
    if "component" in w:
        comp = w["component"]
        comps = {(tuple(sorted(vs)), tuple(sorted(es))) for vs, es in g.components()}
        key = (tuple(comp["vertices"]), tuple(comp["edges"]))
        if key not in comps:
            return Replay(False, "named component not found")
        if any(g.is_full(v) for v in comp["vertices"]):
            return Replay(False, "component contains a full vertex")
        return Replay(True, "component without full vertex")
    asgs = assignments(g)
    if not asgs:
        return Replay(False, "no model assignment")
    walk = [HalfEdge(e, int(i)) for e, i in w["walk"]]
    if not walk:
        return Replay(False, "empty walk")
    for asg in asgs:
        trans = _transitions(g, asg)
        if all(h in trans for h in walk) and all(
                walk[(i + 1) % len(walk)] in trans[walk[i]] for i in range(len(walk))):
            return Replay(True, "closed continuation walk")
    return Replay(False, "walk is not a closed continuation walk")


def _replay_r5(g, w):
    small = small_points(g)
    if small is None:
        return Replay(False, "no model assignment")
    plan = [(step["cycle"], step["k"]) for step in w["plan"]]
    try:
        trace = iterate_covers(g, plan, small)
    except (CoverError, GraphError) as exc:
        return Replay(False, str(exc))
    if list(trace.totals) != list(w["trace"]):
        return Replay(False, f"trace {list(trace.totals)} differs from {w['trace']}")
    if not trace.totals or trace.totals[-1] <= MAX_SMALL:
        return Replay(False, "final small count does not exceed three")
    return Replay(True, f"cover plan reaches {trace.totals[-1]} small points")


def _replay_r6(g, w):
    try:
        a, b = (cycle_from_edges(g, ids) for ids in w["cycles"])
    except GraphError as exc:
        return Replay(False, str(exc))
    if set(a.vertices) & set(b.vertices) or a.edge_set == b.edge_set:
        return Replay(False, "cycles share a vertex")
    return Replay(True, "vertex-disjoint cycles")


def _replay_r7(g, w):
    small = small_points(g)
    if small is None:
        return Replay(False, "no model assignment")
    try:
        found = _knot_violation(g, small, w["cycle"], w["knot"])
    except (CoverError, GraphError) as exc:
        return Replay(False, str(exc))
    if found is None:
        return Replay(False, "knot rule not violated")
    return Replay(found == dict(w), f"count {found['count']}")


_REPLAY = {"R1": _replay_r1, "R2": _replay_r2, "R3": _replay_r3, "R4": _replay_r4,
           "R5": _replay_r5, "R6": _replay_r6, "R7": _replay_r7}


# -- knot rule as a standalone query -----------------------------------------------


@dataclass(frozen=True)
class KnotVerdict:
    knot: str
    weight: int
    allowed_degrees: tuple[int, ...]
    admissible: bool
    witness: Mapping | None = None


def knot_check(g: LabeledGraph, knot: str, cycle_min_weight: int | None = None) -> KnotVerdict:
    """Knot rule for a single loop at one full vertex.

    Every permitted cover degree k (k <= loop weight, k in {2, 3}) must keep
    (small points of the cover) x |pi_1 of the branched cover| <= 3.
    """
    if knot not in KNOT_PI1:
        raise KnotError(f"unsupported knot name {knot!r}")
    loops = [e for e in g.edges if e.is_loop]
    if len(g.edges) != 1 or len(loops) != 1 or g.circles or not g.is_full(loops[0].u):
        raise ValueError("knot_check expects a single loop at a full vertex")
    loop = loops[0]
    weight = int(cycle_min_weight if cycle_min_weight is not None else loop.weight)
    small = frozenset(g.full_vertices())
    if cycle_min_weight is not None:
        g = g.with_weights({loop.id: weight})
    allowed, witness = [], None
    for k in COVER_DEGREES:
        if k > weight:
            continue
        sc = small_count(branched_cover(g, [loop.id], k), small)
        order = KNOT_PI1[knot][k]
        if sc.total * order <= MAX_SMALL:
            allowed.append(k)
        elif witness is None:
            witness = {"cycle": [loop.id], "knot": knot, "k": k, "cover_small": sc.total,
                       "pi1_order": order, "count": sc.total * order}
    return KnotVerdict(knot, weight, tuple(allowed), witness is None, witness)
