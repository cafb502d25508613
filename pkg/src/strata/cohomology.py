"""Rational Betti-number bookkeeping for exact sequences, Gysin reductions and ring patterns.

Only dimensions are modelled.  A long exact sequence is a chain of terms whose
dimensions are sums of known integers and unknown variables; exactness at a
term means the incoming and outgoing ranks add up to its dimension.  The
solver enumerates every integer assignment of the unknowns that admits
consistent ranks.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

MAP_KINDS = ("unconstrained", "injective", "surjective", "zero", "rank", "at_least", "nonzero")


class SpecError(ValueError):
    """Malformed sequence spec (unknown map kind, unbounded unknown, ...)."""


class GysinError(ValueError):
    pass


# --------------------------------------------------------------------------- specs


@dataclass(frozen=True)
class MapConstraint:
    kind: str = "unconstrained"
    value: int = 0

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise SpecError(f"unknown map constraint {self.kind!r}")
        if self.value < 0:
            raise SpecError("rank values must be nonnegative")

    def holds(self, r: int, d_src: int, d_dst: int) -> bool:
        k = self.kind
        if k == "injective":
            return r == d_src
        if k == "surjective":
            return r == d_dst
        if k == "zero":
            return r == 0
        if k == "rank":
            return r == self.value
        if k == "at_least":
            return r >= self.value
        if k == "nonzero":
            return r >= 1
        return True

    def describe(self) -> str:
        return f"{self.kind}={self.value}" if self.kind in ("rank", "at_least") else self.kind


UNCONSTRAINED = MapConstraint()


@dataclass(frozen=True)
class Term:
    """A term of the sequence; its dimension is the sum of ``parts``."""

    label: str
    parts: tuple[int | str, ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(p for p in self.parts if isinstance(p, str))

    @property
    def known(self) -> int:
        return sum(p for p in self.parts if not isinstance(p, str))


def _as_constraints(m) -> tuple[MapConstraint, ...]:
    if m is None:
        return ()
    if isinstance(m, MapConstraint):
        return (m,)
    if isinstance(m, str):
        return (MapConstraint(m),)
    return tuple(c for x in m for c in _as_constraints(x))


@dataclass(frozen=True)
class SequenceSpec:
    """``terms[0] -> terms[1] -> ... -> terms[-1]``; ``maps[i]`` constrains terms[i] -> terms[i+1].

    With ``zero_start``/``zero_end`` the sequence is flanked by zeros.  When
    ``exact`` is false the sequence is only required to be a complex.
    """

    terms: tuple[Term, ...]
    maps: tuple = ()
    exact: bool = True
    zero_start: bool = True
    zero_end: bool = True
    equalities: tuple[tuple[str, str], ...] = ()
    fixed: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if not self.terms:
            raise SpecError("a sequence needs at least one term")
        maps = list(self.maps) + [()] * (len(self.terms) - 1 - len(self.maps))
        if len(maps) != len(self.terms) - 1:
            raise SpecError(f"{len(self.terms)} terms need {len(self.terms) - 1} maps, got {len(self.maps)}")
        object.__setattr__(self, "maps", tuple(_as_constraints(m) for m in maps))
        for t in self.terms:
            for p in t.parts:
                if not isinstance(p, str) and p < 0:
                    raise SpecError(f"negative dimension in {t.label}")

    @property
    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for t in self.terms:
            for v in t.variables:
                seen.setdefault(v)
        for a, b in self.equalities:
            seen.setdefault(a)
            seen.setdefault(b)
        for v, _ in self.fixed:
            seen.setdefault(v)
        return tuple(seen)


@dataclass(frozen=True)
class BettiSolution:
    values: Mapping[str, int]
    ranks: tuple[int, ...]  # boundary-in, maps..., boundary-out

    def dims(self, spec: SequenceSpec) -> tuple[int, ...]:
        return tuple(t.known + sum(self.values[v] for v in t.variables) for t in spec.terms)


class _Classes:
    """Union-find over variable names."""

    def __init__(self, names: Iterable[str]):
        self.parent = {n: n for n in names}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb))
            self.parent[hi] = lo


def upper_bounds(spec: SequenceSpec) -> dict[str, int]:
    """Upper bound of every unknown, propagated through exactness and equalities.

    Raises SpecError when some unknown stays unbounded.
    """
    names = spec.variables
    uf = _Classes(names)
    for a, b in spec.equalities:
        uf.union(a, b)
    ub: dict[str, float] = {uf.find(v): math.inf for v in names}
    for v, val in spec.fixed:
        ub[uf.find(v)] = min(ub[uf.find(v)], val)

    def term_ub(i: int) -> float:
        if i < 0:
            return 0 if spec.zero_start else math.inf
        if i >= len(spec.terms):
            return 0 if spec.zero_end else math.inf
        t = spec.terms[i]
        return t.known + sum(ub[uf.find(v)] for v in t.variables)

    changed = spec.exact
    while changed:
        changed = False
        for i, t in enumerate(spec.terms):
            if not t.variables:
                continue
            room = term_ub(i - 1) + term_ub(i + 1) - t.known
            for v in t.variables:
                r = uf.find(v)
                if room < ub[r]:
                    ub[r] = max(room, -1)
                    changed = True
    loose = sorted(v for v in names if ub[uf.find(v)] == math.inf)
    if loose:
        raise SpecError(f"unbounded unknown(s): {', '.join(loose)}")
    return {v: int(ub[uf.find(v)]) for v in names}


def solve(spec: SequenceSpec, duality: Iterable[tuple[str, str]] | None = None) -> list[BettiSolution]:
    """All assignments of the unknowns admitting ranks compatible with the spec.

    ``duality`` adds equalities (e.g. Poincare duality pairs).  The result is
    sorted by the values of the variables; an empty list is a contradiction.
    """
    if duality:
        spec = SequenceSpec(spec.terms, spec.maps, spec.exact, spec.zero_start, spec.zero_end,
                            tuple(spec.equalities) + tuple(duality), spec.fixed)
    ub = upper_bounds(spec)
    uf = _Classes(spec.variables)
    for a, b in spec.equalities:
        uf.union(a, b)
    fixed: dict[str, int] = {}
    for v, val in spec.fixed:
        r = uf.find(v)
        if fixed.setdefault(r, val) != val:
            return []
    terms = spec.terms
    n = len(terms)
    found: dict[tuple, BettiSolution] = {}
    assign: dict[str, int] = {}
    ranks: list[int] = []

    def choices(root: str) -> Iterable[int]:
        if root in fixed:
            return (fixed[root],) if fixed[root] <= ub[root] else ()
        return range(0, ub[root] + 1)

    def with_vars(roots: list[str], k: int, fn):
        if k == len(roots):
            fn()
            return
        r = roots[k]
        if r in assign:
            with_vars(roots, k + 1, fn)
            return
        for val in choices(r):
            assign[r] = val
            with_vars(roots, k + 1, fn)
        assign.pop(r, None)

    def dim(i: int) -> int:
        t = terms[i]
        return t.known + sum(assign[uf.find(v)] for v in t.variables)

    def record():
        values = {v: assign[uf.find(v)] for v in spec.variables if uf.find(v) in assign}
        missing = [v for v in spec.variables if uf.find(v) not in assign]
        if missing:  # unknowns tied to no term: enumerate their (bounded) range
            roots = sorted({uf.find(v) for v in missing})
            for combo in itertools.product(*(choices(r) for r in roots)):
                vals = dict(values)
                for v in missing:
                    vals[v] = combo[roots.index(uf.find(v))]
                key = tuple(sorted(vals.items()))
                found.setdefault(key, BettiSolution(dict(key), tuple(ranks)))
            return
        key = tuple(sorted(values.items()))
        found.setdefault(key, BettiSolution(dict(key), tuple(ranks)))

    def walk(i: int, r_in: int):
        if i == n:
            if not (spec.zero_end and r_in != 0):
                record()
            return
        roots = sorted({uf.find(v) for v in terms[i].variables})

        def here():
            d = dim(i)
            if r_in > d:
                return
            if i > 0 and not all(c.holds(r_in, dim(i - 1), d) for c in spec.maps[i - 1]):
                return
            outs = (d - r_in,) if spec.exact else range(0, d - r_in + 1)
            for r_out in outs:
                ranks.append(r_out)
                walk(i + 1, r_out)
                ranks.pop()

        with_vars(roots, 0, here)

    if spec.zero_start:
        starts: Iterable[int] = (0,)
    else:
        t0 = terms[0]
        top = t0.known + sum(ub[uf.find(v)] for v in t0.variables)
        starts = range(0, top + 1)
    for r0 in starts:
        ranks.append(r0)
        walk(0, r0)
        ranks.pop()
    return [found[k] for k in sorted(found)]


# --------------------------------------------------------------------------- graded dims


def _convolve(vecs: Iterable[Sequence[int]]) -> tuple[int, ...]:
    out = np.array([1], dtype=np.int64)
    for v in vecs:
        out = np.convolve(out, np.asarray(v, dtype=np.int64))
    return tuple(int(x) for x in out)


def factor_betti(factor: tuple[str, int]) -> tuple[int, ...]:
    kind, n = factor
    if kind == "S":
        if n < 1:
            raise ValueError("sphere dimension must be >= 1")
        return tuple(1 if i in (0, n) else 0 for i in range(n + 1))
    if kind == "CP":
        if n < 1:
            raise ValueError("CP^k needs k >= 1")
        return tuple(1 if i % 2 == 0 else 0 for i in range(2 * n + 1))
    raise ValueError(f"unknown factor kind {kind!r}")


def product_betti(factors: Iterable[tuple[str, int]]) -> tuple[int, ...]:
    return _convolve(factor_betti(f) for f in factors)


def factor_name(factor: tuple[str, int]) -> str:
    kind, n = factor
    return f"S^{n}" if kind == "S" else f"CP^{n}"


@dataclass(frozen=True)
class GradedDims:
    """Betti numbers b_0..b_n; ``None`` marks an unknown.

    ``simply_connected_closed`` fixes b_0 = b_n = 1 and b_1 = 0;
    ``poincare`` adds b_i = b_{n-i}.
    """

    name: str
    dims: tuple[int | None, ...]
    simply_connected_closed: bool = False
    poincare: bool = False

    @classmethod
    def of(cls, name: str, *factors: tuple[str, int]) -> "GradedDims":
        return cls(name, product_betti(factors))

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def var(self, i: int) -> str:
        return f"{self.name}{i}"

    def slot(self, i: int) -> int | str:
        if i < 0 or i > self.top:
            return 0
        d = self.dims[i]
        return self.var(i) if d is None else d

    def fixed(self) -> tuple[tuple[str, int], ...]:
        out = []
        if self.simply_connected_closed:
            for i, val in ((0, 1), (1, 0), (self.top, 1)):
                if 0 <= i <= self.top and self.dims[i] is None:
                    out.append((self.var(i), val))
        if self.poincare:
            for i, d in enumerate(self.dims):
                j = self.top - i
                if d is None and self.dims[j] is not None:
                    out.append((self.var(i), self.dims[j]))
        return tuple(out)

    def duality(self) -> tuple[tuple[str, str], ...]:
        if not self.poincare:
            return ()
        return tuple((self.var(i), self.var(self.top - i)) for i in range(self.top + 1)
                     if i < self.top - i and self.dims[i] is None and self.dims[self.top - i] is None)

    def resolve(self, values: Mapping[str, int]) -> tuple[int, ...]:
        return tuple(d if d is not None else values[self.var(i)] for i, d in enumerate(self.dims))


def mayer_vietoris(M: GradedDims, L1: GradedDims, L2: GradedDims, E: GradedDims,
                   facts: Iterable[tuple] = ()) -> SequenceSpec:
    """Spec for ... -> H^i(M) -> H^i(L1)+H^i(L2) -psi_i-> H^i(E) -> H^{i+1}(M) -> ...

    ``facts`` constrain psi: ("injective", "L1") means psi_i has rank at least
    dim H^i(L1) in every degree; ("nonzero", i) means psi_i != 0.
    """
    terms, maps = [], []
    psi: dict[int, list[MapConstraint]] = {}
    for fact in facts:
        kind, arg = fact
        if kind == "injective":
            space = {"L1": L1, "L2": L2}[arg]
            for i, d in enumerate(space.dims):
                if d is None:
                    raise SpecError("injectivity facts need known dimensions")
                if d:
                    psi.setdefault(i, []).append(MapConstraint("at_least", d))
        elif kind == "nonzero":
            psi.setdefault(int(arg), []).append(MapConstraint("nonzero"))
        else:
            raise SpecError(f"unknown fact {fact!r}")
    for i in range(M.top + 1):
        terms += [Term(f"H^{i}(M)", (M.slot(i),)),
                  Term(f"H^{i}(L1)+H^{i}(L2)", (L1.slot(i), L2.slot(i))),
                  Term(f"H^{i}(E)", (E.slot(i),))]
        maps += [(), tuple(psi.get(i, ())), ()]
    maps.pop()
    eqs = M.duality() + L1.duality() + L2.duality() + E.duality()
    fixed = M.fixed() + L1.fixed() + L2.fixed() + E.fixed()
    return SequenceSpec(tuple(terms), tuple(maps), equalities=eqs, fixed=fixed)


# --------------------------------------------------------------------------- ring patterns

PATTERN_KINDS = ("Sphere", "ComplexProjective", "ProductTwoSpheres", "ProductThreeSpheres",
                 "ComplexProjectiveTimesSphere")


@dataclass(frozen=True)
class RingPattern:
    kind: str
    factors: tuple[tuple[str, int], ...]

    @property
    def name(self) -> str:
        return "x".join(factor_name(f) for f in self.factors)

    @property
    def betti(self) -> tuple[int, ...]:
        return product_betti(self.factors)

    @property
    def lemma_applies(self) -> bool:
        """Side conditions under which the catalogued rational homotopy type is forced."""
        dims = [n for _, n in self.factors]
        if self.kind in ("Sphere", "ComplexProjective"):
            return True
        if self.kind == "ProductTwoSpheres":
            return any(n % 2 for n in dims)
        if self.kind == "ProductThreeSpheres":
            return sum(n % 2 for n in dims) == 2
        return False

    def model_generators(self) -> tuple[str, ...]:
        """Generators of the minimal model (metadata only)."""
        gens = []
        for kind, n in self.factors:
            if kind == "CP":
                gens += [f"a{2}", f"b{2 * n + 1}"]
            elif n % 2:
                gens.append(f"a{n}")
            else:
                gens += [f"a{n}", f"b{2 * n - 1}"]
        return tuple(gens)

    def __str__(self) -> str:
        return self.name


def _sphere_partitions(total: int, parts: int, lo: int = 2):
    if parts == 1:
        if total >= lo:
            yield (total,)
        return
    for a in range(lo, total + 1):
        for rest in _sphere_partitions(total - a, parts - 1, a):
            yield (a,) + rest


def catalog(dim: int) -> tuple[RingPattern, ...]:
    """All catalogued patterns of the given dimension (simply connected factors only)."""
    out = [RingPattern("Sphere", (("S", dim),))] if dim >= 2 else []
    if dim % 2 == 0 and dim >= 4:
        out.append(RingPattern("ComplexProjective", (("CP", dim // 2),)))
    for kind, parts in (("ProductTwoSpheres", 2), ("ProductThreeSpheres", 3)):
        for ns in _sphere_partitions(dim, parts):
            out.append(RingPattern(kind, tuple(("S", n) for n in ns)))
    for k in range(2, dim // 2 + 1):
        m = dim - 2 * k
        if m >= 2:
            out.append(RingPattern("ComplexProjectiveTimesSphere", (("CP", k), ("S", m))))
    return tuple(out)


@dataclass(frozen=True)
class PatternMatch:
    betti: tuple[int, ...]
    patterns: tuple[RingPattern, ...]

    @property
    def elliptic(self) -> bool:
        return bool(self.patterns)

    @property
    def verdict(self) -> str:
        return "rationally elliptic" if self.patterns else "no catalogued pattern"


def match_pattern(betti: Sequence[int], hints: Iterable[str] | None = None) -> PatternMatch:
    """Catalog patterns whose Betti vector equals ``betti``; ``hints`` restricts the kinds."""
    betti = tuple(int(b) for b in betti)
    if betti != betti[::-1]:
        raise ValueError(f"Betti vector {betti} is not Poincare dual")
    kinds = set(hints) if hints is not None else set(PATTERN_KINDS)
    bad = kinds - set(PATTERN_KINDS)
    if bad:
        raise ValueError(f"unknown pattern kind(s): {sorted(bad)}")
    found = tuple(p for p in catalog(len(betti) - 1) if p.kind in kinds and p.betti == betti)
    return PatternMatch(betti, found)


# --------------------------------------------------------------------------- Gysin


def cup_ranks(pattern: RingPattern) -> dict[int, int]:
    """Ranks of cup product with the degree-2 generator, from the pattern's monomial basis.

    The generator is the CP^k class if there is one, otherwise the S^2 class.
    """
    idx = next((i for i, f in enumerate(pattern.factors) if f[0] == "CP"), None)
    if idx is None:
        idx = next((i for i, f in enumerate(pattern.factors) if f == ("S", 2)), None)
    if idx is None:
        raise GysinError(f"{pattern.name} has no degree-2 generator")
    tops = [n if kind == "CP" else 1 for kind, n in pattern.factors]
    degs = [2 if kind == "CP" else n for kind, n in pattern.factors]
    ranks: dict[int, int] = {}
    for exps in itertools.product(*(range(t + 1) for t in tops)):
        if exps[idx] < tops[idx]:
            d = sum(e * g for e, g in zip(exps, degs))
            ranks[d] = ranks.get(d, 0) + 1
    return ranks


def gysin_reduce(betti: Sequence[int], ranks: Mapping[int, int] | RingPattern) -> tuple[int, ...]:
    """Betti numbers of the circle bundle N -> M whose Euler class is the degree-2 generator.

    b_i(N) = (b_i - c_{i-2}) + (b_{i-1} - c_{i-1}), c_j = rank of cup: H^j -> H^{j+2}.
    """
    b = [int(x) for x in betti]
    if len(b) < 3 or b[2] != 1:
        raise GysinError("need b_2(M) = 1")
    c = cup_ranks(ranks) if isinstance(ranks, RingPattern) else dict(ranks)
    n = len(b) - 1

    def bb(i):
        return b[i] if 0 <= i <= n else 0

    for j, r in c.items():
        if r < 0 or r > bb(j) or r > bb(j + 2):
            raise GysinError(f"inconsistent rank c_{j} = {r}")
    if c.get(0, 0) != 1:
        raise GysinError("cup with the generator must be nonzero on H^0")
    out = [(bb(i) - c.get(i - 2, 0)) + (bb(i - 1) - c.get(i - 1, 0)) for i in range(n + 2)]
    if any(x < 0 for x in out):
        raise GysinError("negative Betti number")
    return tuple(out)


# --------------------------------------------------------------------------- scenarios


@dataclass(frozen=True)
class CaseScenario:
    id: str
    dim: int
    group: str
    L1: GradedDims
    L2: GradedDims
    E: GradedDims
    facts: tuple[tuple, ...] = ()
    note: str = ""

    def manifold(self) -> GradedDims:
        return GradedDims("b", (None,) * (self.dim + 1), simply_connected_closed=True, poincare=True)

    def spec(self) -> SequenceSpec:
        return mayer_vietoris(self.manifold(), self.L1, self.L2, self.E, self.facts)


def _space(name: str, *factors) -> GradedDims:
    return GradedDims.of(name, *factors)


S = "S"
SCENARIOS: dict[str, CaseScenario] = {sc.id: sc for sc in (
    CaseScenario("two-point-6", 6, "S^3", _space("L1", (S, 2)), _space("L2", (S, 2)),
                 _space("E", (S, 3), (S, 2)), (("injective", "L1"),),
                 "two singular orbits ~ S^2"),
    CaseScenario("two-point-7", 7, "S^3xS^1", _space("L1", (S, 3)), _space("L2", (S, 3)),
                 _space("E", (S, 3), (S, 3)), (("nonzero", 3),),
                 "orbits ~ S^3 after H^1 vanishing"),
    CaseScenario("two-point-9", 9, "S^3xS^3", _space("L1", (S, 3), (S, 2)), _space("L2", (S, 3), (S, 2)),
                 _space("E", (S, 3), (S, 3), (S, 2)), (("injective", "L1"),),
                 "orbits ~ S^3xS^2"),
    CaseScenario("one-point-6", 6, "S^3", _space("L1", (S, 2)), _space("L2", (S, 3)),
                 _space("E", (S, 3), (S, 2)), (("injective", "L1"),),
                 "singular orbit ~ S^2, principal orbit ~ G"),
    CaseScenario("one-point-7", 7, "S^3xS^1", _space("L1", (S, 3)), _space("L2", (S, 3), (S, 1)),
                 GradedDims("E", (1, None, None, None, None, None, 1), poincare=True), (),
                 "principal orbit ~ G = S^3xS^1; sphere bundle only known to be a closed oriented 6-manifold"),
    CaseScenario("one-point-9", 9, "S^3xS^3", _space("L1", (S, 3), (S, 2)), _space("L2", (S, 3), (S, 3)),
                 _space("E", (S, 3), (S, 3), (S, 2)), (("injective", "L1"), ("injective", "L2")),
                 "singular orbit ~ S^3xS^2, principal orbit ~ G"),
)}


@dataclass(frozen=True)
class RingBranch:
    hypothesis: str
    pattern: RingPattern
    via: str  # "lemma" or "gysin"
    reduced: tuple[int, ...] | None = None
    reduced_patterns: tuple[RingPattern, ...] = ()

    @property
    def settled(self) -> bool:
        if self.via == "lemma":
            return True
        return any(p.lemma_applies for p in self.reduced_patterns)


def _hypothesis(p: RingPattern) -> str:
    if any(f[0] == "CP" for f in p.factors):
        return "z_2^2 != 0"
    if ("S", 2) in p.factors:
        return "z_2^2 = 0"
    return ""


def ring_branches(betti: Sequence[int]) -> tuple[RingBranch, ...]:
    out = []
    for p in match_pattern(betti).patterns:
        hyp = _hypothesis(p) if betti[2] == 1 else ""
        if p.lemma_applies:
            out.append(RingBranch(hyp, p, "lemma"))
            continue
        try:
            red = gysin_reduce(betti, p)
        except GysinError:
            out.append(RingBranch(hyp, p, "gysin"))
            continue
        out.append(RingBranch(hyp, p, "gysin", red, match_pattern(red).patterns))
    return tuple(out)


@dataclass(frozen=True)
class CaseResult:
    scenario: CaseScenario
    solutions: tuple[tuple[int, ...], ...]
    branches: tuple[tuple[RingBranch, ...], ...]  # per solution
    verdict: str

    @property
    def patterns(self) -> tuple[str, ...]:
        return tuple(b.pattern.name for bs in self.branches for b in bs)

    def to_dict(self) -> dict:
        return {
            "case": self.scenario.id,
            "dimension": self.scenario.dim,
            "group": self.scenario.group,
            "verdict": self.verdict,
            "solutions": [
                {"betti": list(sol),
                 "patterns": [{"pattern": b.pattern.name, "hypothesis": b.hypothesis, "via": b.via,
                               "reduced_betti": list(b.reduced) if b.reduced else None,
                               "reduced_patterns": [p.name for p in b.reduced_patterns],
                               "model": list((b.reduced_patterns[0] if b.via == "gysin" and b.reduced_patterns
                                              else b.pattern).model_generators())}
                              for b in bs]}
                for sol, bs in zip(self.solutions, self.branches)],
        }


def run_case(scenario: CaseScenario | str) -> CaseResult:
    sc = SCENARIOS[scenario] if isinstance(scenario, str) else scenario
    M = sc.manifold()
    sols = sorted({M.resolve(s.values) for s in solve(sc.spec())})
    branches = tuple(ring_branches(b) for b in sols)
    if not sols:
        verdict = "contradiction"
    elif all(bs and all(b.settled for b in bs) for bs in branches):
        verdict = "rationally elliptic"
    else:
        verdict = "undetermined"
    return CaseResult(sc, tuple(sols), branches, verdict)


# --------------------------------------------------------------------------- scenario files


def _dims(raw, name: str) -> GradedDims:
    if isinstance(raw, dict):
        if "factors" in raw:
            g = GradedDims.of(name, *[(k, int(n)) for k, n in raw["factors"]])
            return GradedDims(name, g.dims, bool(raw.get("simply_connected_closed")), bool(raw.get("poincare")))
        return GradedDims(name, tuple(raw["dims"]), bool(raw.get("simply_connected_closed")),
                          bool(raw.get("poincare")))
    return GradedDims(name, tuple(raw))


def _constraint(raw) -> tuple[MapConstraint, ...]:
    if raw is None:
        return ()
    if isinstance(raw, str):
        return (MapConstraint(raw),)
    if isinstance(raw, dict):
        return tuple(MapConstraint(k, int(v)) for k, v in raw.items())
    return tuple(c for x in raw for c in _constraint(x))


def load_scenario(text: str) -> CaseScenario | SequenceSpec:
    """Parse a JSON scenario file: either a Mayer-Vietoris case or a bare sequence.

    Case: {"kind": "case", "id", "dim", "group", "L1", "L2", "E", "facts"}; each
    space is a Betti list (null = unknown) or {"factors": [["S", 3], ...]}.
    Sequence: {"kind": "sequence", "terms": [[label, part, ...], ...],
    "maps": [null | "injective" | {"rank": 2} | [...], ...], "zero_start",
    "zero_end", "exact", "equalities", "fixed"}.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise SpecError("scenario must be a JSON object")
    kind = raw.get("kind")
    try:
        if kind == "case":
            facts = tuple(tuple(f) for f in raw.get("facts", ()))
            return CaseScenario(str(raw.get("id", "custom")), int(raw["dim"]), str(raw.get("group", "?")),
                                _dims(raw["L1"], "L1"), _dims(raw["L2"], "L2"), _dims(raw["E"], "E"),
                                facts, str(raw.get("note", "")))
        if kind == "sequence":
            terms = tuple(Term(str(t[0]), tuple(t[1:])) for t in raw["terms"])
            maps = tuple(_constraint(m) for m in raw.get("maps", ()))
            return SequenceSpec(terms, maps, bool(raw.get("exact", True)), bool(raw.get("zero_start", True)),
                                bool(raw.get("zero_end", True)),
                                tuple(tuple(e) for e in raw.get("equalities", ())),
                                tuple((k, int(v)) for k, v in raw.get("fixed", {}).items()))
    except (KeyError, TypeError, IndexError) as exc:
        raise SpecError(f"malformed scenario: {exc!r}") from None
    raise SpecError(f"unknown scenario kind {kind!r}")
