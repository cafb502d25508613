"""Finite rotation groups, their spherical quotients, and the vertex models built from them.

Every vertex of a labeled graph looks locally like a cone over a spherical
2-orbifold S^2/H for a finite H in SO(3).  The quotient's cone points carry
the edge weights, and the antipodal map of S^2 (which commutes with H) induces
an involution on cone points that decides which incoming edge a geodesic
continues along.

>>> tab = cone_points(build_group("Tetrahedral"))
>>> sorted(p.order for p in tab.points)
[2, 3, 3]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .graph import FULL, HOLLOW

TOL = 1e-9
PHI = (1 + 5 ** 0.5) / 2

POLYHEDRAL = {"Tetrahedral": 12, "Octahedral": 24, "Icosahedral": 60}
TRIPLE_GROUP = {(2, 3, 3): "Tetrahedral", (2, 3, 4): "Octahedral", (2, 3, 5): "Icosahedral"}


def rotation(axis: Sequence[float], angle: float) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    x, y, z = a
    K = np.array([[0, -z, y], [z, 0, -x], [-y, x, 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def _key(m: np.ndarray) -> tuple:
    return tuple(np.round(m, 9).ravel() + 0.0)


@dataclass(frozen=True)
class MatrixGroup:
    name: str
    param: int | None
    elements: tuple[np.ndarray, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param})"

    def conjugate(self, r: np.ndarray) -> "MatrixGroup":
        return MatrixGroup(self.name, self.param, tuple(r @ g @ r.T for g in self.elements))

    def is_closed(self) -> bool:
        keys = {_key(g) for g in self.elements}
        if len(keys) != len(self.elements):
            return False
        for a in self.elements:
            if _key(a.T) not in keys:
                return False
            for b in self.elements:
                if _key(a @ b) not in keys:
                    return False
        return True


def _generate(gens: list[np.ndarray]) -> tuple[np.ndarray, ...]:
    elems = {_key(np.eye(3)): np.eye(3)}
    frontier = [np.eye(3)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                p = a @ g
                k = _key(p)
                if k not in elems:
                    elems[k] = p
                    nxt.append(p)
        frontier = nxt
    return tuple(elems[k] for k in sorted(elems))


def _generators(name: str, n: int | None) -> list[np.ndarray]:
    if name == "Cyclic":
        return [rotation((0, 0, 1), 2 * np.pi / n)]
    if name == "Dihedral":
        return [rotation((0, 0, 1), 2 * np.pi / n), rotation((1, 0, 0), np.pi)]
    if name == "Tetrahedral":
        return [rotation((1, 1, 1), 2 * np.pi / 3), rotation((0, 0, 1), np.pi)]
    if name == "Octahedral":
        return [rotation((1, 1, 1), 2 * np.pi / 3), rotation((0, 0, 1), np.pi / 2)]
    if name == "Icosahedral":
        return [rotation((1, 1, 1), 2 * np.pi / 3), rotation((0, 1, PHI), 2 * np.pi / 5)]
    raise ValueError(f"unknown group {name!r}")


@lru_cache(maxsize=None)
def build_group(name: str, param: int | None = None) -> MatrixGroup:
    """Explicit element list of a finite rotation group, verified closed.

    ``name`` is one of Cyclic, Dihedral (both need ``param`` >= 2), Tetrahedral,
    Octahedral, Icosahedral.
    """
    if name in ("Cyclic", "Dihedral"):
        if param is None or int(param) < 2:
            raise ValueError(f"{name} needs a parameter >= 2, got {param}")
        param = int(param)
        expected = param if name == "Cyclic" else 2 * param
    elif name in POLYHEDRAL:
        param = None
        expected = POLYHEDRAL[name]
    else:
        raise ValueError(f"unknown group {name!r}")
    grp = MatrixGroup(name, param, _generate(_generators(name, param)))
    if grp.order != expected or not grp.is_closed():
        raise AssertionError(f"{grp.label}: generated order {grp.order}, expected {expected}")
    return grp


# -- quotient orbifold --------------------------------------------------------


@dataclass(frozen=True)
class ConePoint:
    id: int
    order: int
    axis: tuple[float, float, float]


@dataclass(frozen=True)
class ConePointTable:
    group: str
    group_order: int
    points: tuple[ConePoint, ...]
    involution: tuple[int, ...]  # involution[i] = partner of cone point i
    kappa: int = 1

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(p.order for p in self.points)

    def riemann_hurwitz_holds(self) -> bool:
        lhs = 2 - sum(1 - Fraction(1, m) for m in self.orders)
        return lhs == Fraction(2, self.group_order)

    def involution_ok(self) -> bool:
        a = self.involution
        return all(a[a[i]] == i and self.points[a[i]].order == self.points[i].order
                   for i in range(len(a)))

    def signature(self) -> tuple:
        """Relabeling-invariant summary: sorted (order, partner order, self-paired)."""
        return tuple(sorted((p.order, self.points[self.involution[p.id]].order,
                             self.involution[p.id] == p.id) for p in self.points))

    def describe(self) -> str:
        rows = [f"{self.group} (order {self.group_order})"]
        for p in self.points:
            partner = self.involution[p.id]
            tag = "self" if partner == p.id else f"<-> {partner}"
            rows.append(f"  point {p.id}: order {p.order}  a: {tag}")
        return "\n".join(rows)


def _axis(g: np.ndarray) -> np.ndarray | None:
    if np.allclose(g, np.eye(3), atol=TOL):
        return None
    w, v = np.linalg.eig(g)
    i = int(np.argmin(np.abs(w - 1)))
    ax = np.real(v[:, i])
    return ax / np.linalg.norm(ax)


def _find(points: list[np.ndarray], x: np.ndarray) -> int:
    for i, p in enumerate(points):
        if np.linalg.norm(p - x) < 1e-6:
            return i
    return -1


def cone_points(grp: MatrixGroup) -> ConePointTable:
    """Cone points of S^2/G with orders and the involution induced by -id.

    One cone point per orbit of rotation-axis points; its order is the
    stabilizer size; the partner of an orbit is the orbit of the antipodes.
    """
    pts: list[np.ndarray] = []
    for g in grp.elements:
        ax = _axis(g)
        if ax is None:
            continue
        for s in (ax, -ax):
            if _find(pts, s) < 0:
                pts.append(s)
    orbit_of = [-1] * len(pts)
    orbits: list[list[int]] = []
    for i, p in enumerate(pts):
        if orbit_of[i] >= 0:
            continue
        members = sorted({_find(pts, g @ p) for g in grp.elements})
        if -1 in members:
            raise AssertionError("axis set not closed under the group")
        for j in members:
            orbit_of[j] = len(orbits)
        orbits.append(members)
    orders = [grp.order // len(o) for o in orbits]
    reps = [pts[o[0]] for o in orbits]
    # deterministic ids: sort by order, then by representative coordinates
    perm = sorted(range(len(orbits)), key=lambda i: (orders[i], tuple(np.round(reps[i], 6))))
    new_id = {old: new for new, old in enumerate(perm)}
    points = tuple(ConePoint(new_id[i], orders[i], tuple(float(x) for x in reps[i])) for i in perm)
    partner = [0] * len(orbits)
    for i in range(len(orbits)):
        partner[new_id[i]] = new_id[orbit_of[_find(pts, -reps[i])]]
    return ConePointTable(grp.label, grp.order, points, tuple(partner))


@lru_cache(maxsize=None)
def table_for_weights(weights: tuple[int, ...]) -> ConePointTable:
    """Cone table of the quotient whose cone orders are ``weights`` (a pair or a valid triple)."""
    ws = tuple(sorted(weights))
    if len(ws) == 2:
        if ws[0] != ws[1]:
            raise ValueError(f"no spherical quotient with two distinct cone orders {ws}")
        return cone_points(build_group("Cyclic", ws[0]))
    if len(ws) == 3 and ws[:2] == (2, 2):
        return cone_points(build_group("Dihedral", ws[2]))
    if ws in TRIPLE_GROUP:
        return cone_points(build_group(TRIPLE_GROUP[ws]))
    raise ValueError(f"no spherical quotient with cone orders {ws}")


# -- local models -------------------------------------------------------------

EDGE_INTERIOR = "EdgeInterior"
TRIVALENT_HOLLOW = "TrivalentHollow"
TRIVALENT_FULL = "TrivalentFull"
FULL_VALENCY2 = "FullValency2"
FULL_VALENCY1 = "FullValency1"
FULL_ISOLATED = "FullIsolated"


class ValencyError(ValueError):
    pass


def valid_triple(ws: Sequence[int]) -> bool:
    t = tuple(sorted(int(w) for w in ws))
    return len(t) == 3 and (t[:2] == (2, 2) and t[2] >= 2 or t in TRIPLE_GROUP)


def triple_is_small(ws: Sequence[int]) -> bool:
    return tuple(sorted(ws)) in TRIPLE_GROUP


@dataclass(frozen=True, order=True)
class LocalModel:
    """Admissible neighbourhood type.

    ``weights`` lists slot weights in slot order (sorted ascending for
    templates).  ``continuation`` is the relation on slot indices induced by
    the antipodal involution; a pair (i, i) means a geodesic arriving along
    slot i can only leave along the same slot.
    """

    kind: str
    weights: tuple[int, ...]
    small: bool
    continuation: frozenset = frozenset()

    @property
    def marking(self) -> str:
        return HOLLOW if self.kind in (EDGE_INTERIOR, TRIVALENT_HOLLOW) else FULL

    def describe(self) -> str:
        return f"{self.kind}({','.join(map(str, self.weights))})"


def _slot_pairs(ws: tuple[int, ...]) -> frozenset:
    """Transfer the cone-point involution to slots; equal weights take cone points in table order."""
    tab = table_for_weights(ws)
    free = {m: [p.id for p in tab.points if p.order == m] for m in set(tab.orders)}
    cone_of_slot = []
    for w in ws:
        cone_of_slot.append(free[w].pop(0))
    slot_of_cone = {c: s for s, c in enumerate(cone_of_slot)}
    pairs = set()
    for s, c in enumerate(cone_of_slot):
        t = slot_of_cone[tab.involution[c]]
        pairs.add((min(s, t), max(s, t)))
    return frozenset(pairs)


@lru_cache(maxsize=None)
def make_model(kind: str, weights: tuple[int, ...]) -> LocalModel:
    ws = tuple(sorted(int(w) for w in weights))
    if kind == EDGE_INTERIOR:
        if len(ws) != 2 or ws[0] != ws[1] or ws[0] < 2:
            raise ValueError(f"edge interior needs two equal weights >= 2, got {ws}")
        return LocalModel(kind, ws, False, _slot_pairs(ws))
    if kind in (TRIVALENT_HOLLOW, TRIVALENT_FULL):
        if not valid_triple(ws):
            raise ValueError(f"not a spherical triple: {ws}")
        if kind == TRIVALENT_HOLLOW:
            return LocalModel(kind, ws, triple_is_small(ws), _slot_pairs(ws))
        return LocalModel(kind, ws, True)
    if kind == FULL_VALENCY2 and len(ws) == 2 and ws[0] >= 2:
        return LocalModel(kind, ws, True)
    if kind == FULL_VALENCY1 and len(ws) == 1 and ws[0] >= 2:
        return LocalModel(kind, ws, True)
    if kind == FULL_ISOLATED and ws == ():
        return LocalModel(kind, ws, True)
    raise ValueError(f"bad model {kind}{ws}")


def model_catalog(marking: str, valency: int, max_weight: int = 12) -> frozenset[LocalModel]:
    """Admissible vertex templates of the given marking and valency (weights up to ``max_weight``).

    Hollow points of valency <= 2 are interior points of edges, not vertices,
    so they have no vertex template.
    """
    if marking not in (HOLLOW, FULL):
        raise ValueError(f"unknown marking {marking!r}")
    if valency > 3 or valency < 0:
        raise ValencyError("valency bound violated")
    rng = range(2, max_weight + 1)
    if valency == 3:
        kind = TRIVALENT_HOLLOW if marking == HOLLOW else TRIVALENT_FULL
        return frozenset(make_model(kind, t) for t in itertools.combinations_with_replacement(rng, 3)
                         if valid_triple(t))
    if marking == HOLLOW:
        return frozenset()
    if valency == 2:
        return frozenset(make_model(FULL_VALENCY2, t) for t in itertools.combinations_with_replacement(rng, 2))
    if valency == 1:
        return frozenset(make_model(FULL_VALENCY1, (q,)) for q in rng)
    return frozenset({make_model(FULL_ISOLATED, ())})


def models_for(marking: str, weights: Sequence) -> list[LocalModel]:
    """Templates matching a vertex with exactly these slot weights (integers)."""
    ws = tuple(sorted(int(w) for w in weights))
    if any(Fraction(w) != int(w) or int(w) < 2 for w in weights):
        return []
    n = len(ws)
    if n > 3:
        raise ValencyError("valency bound violated")
    if n == 3:
        if not valid_triple(ws):
            return []
        return [make_model(TRIVALENT_HOLLOW if marking == HOLLOW else TRIVALENT_FULL, ws)]
    if marking == HOLLOW:
        return []
    kind = {2: FULL_VALENCY2, 1: FULL_VALENCY1, 0: FULL_ISOLATED}[n]
    return [make_model(kind, ws)]


def slot_assignments(weights: Sequence) -> list[tuple[int, ...]]:
    """All ways to map actual slots (given in order) onto sorted template slots.

    Equal weights may be matched in any order; the list is deduplicated.
    """
    order = sorted(range(len(weights)), key=lambda i: weights[i])
    out = set()
    groups: dict = {}
    for i in order:
        groups.setdefault(weights[i], []).append(i)
    keys = sorted(groups)
    for combo in itertools.product(*(itertools.permutations(groups[k]) for k in keys)):
        flat = [i for part in combo for i in part]
        tmpl = [0] * len(weights)
        for pos, slot in enumerate(flat):
            tmpl[slot] = pos
        out.add(tuple(tmpl))
    return sorted(out)


def continuation_pairs(model: LocalModel) -> frozenset:
    """Slot pairs (i, j), i <= j, exchanged by the antipodal involution."""
    return model.continuation
