"""Hot loop for canonical forms: lexicographic minimum over vertex permutations.

Two interchangeable backends are provided.  The numba backend walks the
permutations one by one with early exit; the numpy backend materializes every
permuted code matrix and lexsorts them.  ``STRATA_NUMBA=0`` forces numpy, any
other value (or unset) uses numba when it can be imported.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly when numba is present
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _numba_requested() -> bool:
    return os.environ.get("STRATA_NUMBA", "1").strip().lower() not in {"0", "false", "no", "off"}


def lexmin_permutation_numpy(codes: np.ndarray, perms: np.ndarray) -> int:
    """Index of the permutation whose relabeled code matrix is lexicographically least."""
    m, n = perms.shape
    if m == 1 or n == 0:
        return 0
    flat = codes[perms[:, :, None], perms[:, None, :]].reshape(m, n * n)
    # lexsort treats the last key as primary
    order = np.lexsort(flat.T[::-1])
    return int(order[0])


if HAVE_NUMBA:

    @njit(cache=True)
    def _lexmin_nb(codes, perms):  # pragma: no cover - compiled
        m, n = perms.shape
        best = 0
        for t in range(1, m):
            cmp = 0
            for i in range(n):
                pi = perms[t, i]
                bi = perms[best, i]
                for j in range(n):
                    a = codes[pi, perms[t, j]]
                    b = codes[bi, perms[best, j]]
                    if a != b:
                        cmp = -1 if a < b else 1
                        break
                if cmp != 0:
                    break
            if cmp < 0:
                best = t
        return best

    def lexmin_permutation_numba(codes: np.ndarray, perms: np.ndarray) -> int:
        if perms.shape[0] == 1 or perms.shape[1] == 0:
            return 0
        return int(_lexmin_nb(np.ascontiguousarray(codes, dtype=np.int64),
                              np.ascontiguousarray(perms, dtype=np.int64)))

else:  # pragma: no cover
    lexmin_permutation_numba = None


def backend() -> str:
    return "numba" if HAVE_NUMBA and _numba_requested() else "numpy"


def lexmin_permutation(codes: np.ndarray, perms: np.ndarray) -> int:
    if backend() == "numba":
        return lexmin_permutation_numba(codes, perms)
    return lexmin_permutation_numpy(codes, perms)
