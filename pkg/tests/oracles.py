"""Test-only generators and brute-force references."""

from __future__ import annotations

import itertools
import random

import numpy as np

from strata.cohomology import MapConstraint, SequenceSpec, Term
from strata.graph import FULL, HOLLOW, graph


def random_graph(rng: random.Random, max_vertices: int = 5, max_edges: int = 7, max_weight: int = 6):
    n = rng.randint(1, max_vertices)
    vs = {f"v{i}": rng.choice((FULL, HOLLOW)) for i in range(n)}
    es = []
    for i in range(rng.randint(0, max_edges)):
        u, v = rng.randrange(n), rng.randrange(n)
        es.append((f"e{i}", f"v{u}", f"v{v}", rng.randint(2, max_weight)))
    cs = [(f"c{i}", rng.randint(2, max_weight)) for i in range(rng.choice((0, 0, 0, 1)))]
    return graph(vs, es, cs)


KINDS = ("unconstrained", "injective", "surjective", "zero", "rank", "at_least", "nonzero")


def random_spec(rng: random.Random, max_terms: int = 7, max_dim: int = 4, max_unknowns: int = 6):
    """Random exact spec whose unknown terms are never adjacent and never at an open end."""
    n = rng.randint(2, max_terms)
    zero_start = rng.random() < 0.8
    zero_end = rng.random() < 0.8
    unknown = [False] * n
    names: list[str] = []
    for i in range(n):
        if len(names) >= max_unknowns or (i > 0 and unknown[i - 1]):
            continue
        if (i == 0 and not zero_start) or (i == n - 1 and not zero_end):
            continue
        if rng.random() < 0.45:
            unknown[i] = True
            # reuse a name now and then to couple terms
            names.append(rng.choice(names) if names and rng.random() < 0.2 else f"x{len(names)}")
    parts, it = [], iter(names)
    for i in range(n):
        parts.append(next(it) if unknown[i] else rng.randint(0, max_dim))
    terms = tuple(Term(f"T{i}", (p,)) for i, p in enumerate(parts))
    maps = []
    for _ in range(n - 1):
        k = rng.choice(KINDS + ("unconstrained",) * 3)
        maps.append((MapConstraint(k, rng.randint(0, 2)),) if k in ("rank", "at_least")
                    else ((MapConstraint(k),) if k != "unconstrained" else ()))
    uniq = sorted(set(names))
    eqs = tuple((a, b) for a, b in itertools.combinations(uniq, 2) if rng.random() < 0.1)
    fixed = tuple((v, rng.randint(0, 3)) for v in uniq if rng.random() < 0.1)
    return SequenceSpec(terms, tuple(maps), True, zero_start, zero_end, eqs, fixed)


def brute_force(spec: SequenceSpec) -> set[tuple]:
    """Assignments of unknowns found by enumerating every rank tuple directly.

    Only for specs whose terms have a single part; a rank is capped by any
    known neighbouring dimension (all maps here touch a known term or a zero).
    """
    terms = spec.terms
    n = len(terms)
    known = [None if isinstance(t.parts[0], str) else t.parts[0] for t in terms]
    big = sum(k for k in known if k is not None) + 1

    def cap(src, dst):
        vals = [d for d in (src, dst) if d is not None]
        return min(vals) if vals else big

    caps = [0 if spec.zero_start else cap(None, known[0])]
    caps += [cap(known[i], known[i + 1]) for i in range(n - 1)]
    caps.append(0 if spec.zero_end else cap(known[-1], None))
    grids = np.array(list(itertools.product(*(range(c + 1) for c in caps))), dtype=np.int64)
    if grids.size == 0:
        return set()
    dims = grids[:, :-1] + grids[:, 1:]  # exactness at every term
    ok = np.ones(len(grids), dtype=bool)
    for i, k in enumerate(known):
        if k is not None:
            ok &= dims[:, i] == k
    for i, cs in enumerate(spec.maps):
        r, src, dst = grids[:, i + 1], dims[:, i], dims[:, i + 1]
        for c in cs:
            ok &= {"injective": r == src, "surjective": r == dst, "zero": r == 0,
                   "rank": r == c.value, "at_least": r >= c.value, "nonzero": r >= 1,
                   "unconstrained": np.ones_like(r, dtype=bool)}[c.kind]
    out = set()
    for row in dims[ok]:
        vals: dict[str, int] = {}
        good = True
        for i, t in enumerate(terms):
            p = t.parts[0]
            if isinstance(p, str):
                if vals.setdefault(p, int(row[i])) != int(row[i]):
                    good = False
        for a, b in spec.equalities:
            good &= vals.get(a) == vals.get(b)
        for v, val in spec.fixed:
            good &= vals.get(v) == val
        if good:
            out.add(tuple(sorted(vals.items())))
    return out
