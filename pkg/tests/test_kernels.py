import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strata import _kernels
from strata.graph import FULL, HOLLOW, canonical_form, graph

G16 = graph({"T": FULL, "A": HOLLOW, "B": HOLLOW, "M": HOLLOW},
            [("e1", "T", "A", 2), ("e2", "T", "B", 2), ("e3", "T", "M", 3),
             ("e4", "A", "B", 3), ("e5", "A", "M", 3), ("e6", "B", "M", 2)])


def _permuted(codes, p):
    return codes[np.ix_(p, p)]


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_backends_pick_the_same_minimum(n, seed):
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, 3, size=(n, n)).astype(np.int64)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    a = _kernels.lexmin_permutation_numpy(codes, perms)
    b = _kernels.lexmin_permutation_numba(codes, perms)
    assert a == b
    best = _permuted(codes, perms[a]).ravel().tolist()
    assert best == min(_permuted(codes, p).ravel().tolist() for p in perms)


@pytest.mark.parametrize("flag, expect", [("0", "numpy"), ("off", "numpy"), ("1", "numba")])
def test_backend_flag(monkeypatch, flag, expect):
    monkeypatch.setenv("STRATA_NUMBA", flag)
    if expect == "numba" and not _kernels.HAVE_NUMBA:
        expect = "numpy"
    assert _kernels.backend() == expect


def test_canonical_form_backend_independent(monkeypatch):
    monkeypatch.setenv("STRATA_NUMBA", "0")
    a = canonical_form(G16)
    monkeypatch.setenv("STRATA_NUMBA", "1")
    assert canonical_form(G16) == a
