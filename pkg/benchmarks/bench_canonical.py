"""Compare the numba and numpy lexmin kernels, then time a full canonical-form pass.

    python benchmarks/bench_canonical.py [--n 7] [--repeat 5]
"""

from __future__ import annotations

import argparse
import itertools
import os
import time

import numpy as np

from strata import _kernels
from strata.enumeration import Bounds, candidates


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=7, help="matrix size (vertices)")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    codes = rng.integers(0, 3, size=(args.n, args.n)).astype(np.int64)
    codes = np.triu(codes) + np.triu(codes, 1).T
    perms = np.array(list(itertools.permutations(range(args.n))), dtype=np.int64)

    print(f"kernel: {len(perms)} permutations of a {args.n}x{args.n} code matrix")
    np_t = _best(lambda: _kernels.lexmin_permutation_numpy(codes, perms), args.repeat)
    print(f"  numpy  {np_t * 1e3:9.3f} ms")
    if _kernels.HAVE_NUMBA:
        _kernels.lexmin_permutation_numba(codes, perms)  # compile
        nb_t = _best(lambda: _kernels.lexmin_permutation_numba(codes, perms), args.repeat)
        print(f"  numba  {nb_t * 1e3:9.3f} ms  ({np_t / nb_t:.1f}x)")
        a = _kernels.lexmin_permutation_numpy(codes, perms)
        b = _kernels.lexmin_permutation_numba(codes, perms)
        same = np.array_equal(codes[perms[a]][:, perms[a]], codes[perms[b]][:, perms[b]])
        print(f"  backends agree: {same}")

    bounds = Bounds(max_vertices=4, max_edges=6, max_weight=4)
    for flag in ("0", "1"):
        os.environ["STRATA_NUMBA"] = flag
        t = time.perf_counter()
        n = len(candidates(bounds))
        print(f"candidates({bounds}) backend={_kernels.backend():5s} {n} graphs "
              f"in {time.perf_counter() - t:.2f} s")


if __name__ == "__main__":
    main()
