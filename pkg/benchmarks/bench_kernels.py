#!/usr/bin/env python3
"""Time the numba kernels against their numpy fallbacks on realistic inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--depth 9]

The inputs come from the five-map system with ratio 1/6 used in the test
suite: lattice levels for ``expand_corners``, sibling covers for ``min_gap``
and the weighted edge matrix for ``power_iterate``.  Each kernel result is
checked for equality between backends before timing.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from lipeq import _kernels
from lipeq.gds import CoverCache, theorem_graph
from lipeq.dimension import count_matrix
from lipeq.ifs_model import HomogeneousIFS
from lipeq.lattice import Lattice

MAPS = ["0", "l*(1-l)", "2*l*(1-l)", "3*l", "1-l"]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(depth):
    ifs = HomogeneousIFS.from_exprs("1/6", MAPS)
    lat = Lattice(ifs)
    prev = lat.level(depth - 1)
    alphas = lat.alpha_array(depth)
    qk = lat.q**depth
    yield ("expand_corners", f"{prev.shape[0]} rows",
           lambda: _kernels.expand_corners_numpy(prev, alphas, lat.p, qk),
           lambda: _kernels.expand_corners_numba(prev, alphas, np.int64(lat.p), np.int64(qk)))

    _, _, gds = theorem_graph(ifs)
    cache = CoverCache(gds)
    r = cache.resolution(6)
    a, b = cache.image(gds.out_edges(5)[0], r), cache.image(gds.out_edges(5)[1], r)
    side = lat.side(r)
    yield ("min_gap", f"{a.shape[0]}x{b.shape[0]} boxes",
           lambda: _kernels.min_gap_numpy(a, b, side),
           lambda: _kernels.min_gap_numba(a, b, np.int64(side)))

    M = count_matrix(gds).astype(np.float64)
    big = np.kron(M, np.ones((40, 40))) / 40
    yield ("power_iterate", f"{big.shape[0]}x{big.shape[0]} matrix",
           lambda: _kernels.power_iterate_numpy(big, 1e-12, 10**6),
           lambda: _kernels.power_iterate_numba(big, 1e-12, 10**6))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--depth", type=int, default=9)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")

    print(f"{'kernel':<16}{'input':<22}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}")
    for name, size, np_fn, nb_fn in cases(args.depth):
        ref, got = np_fn(), nb_fn()  # also warms the JIT
        same = all(np.array_equal(np.asarray(x), np.asarray(y)) or np.allclose(x, y, atol=1e-12)
                   for x, y in zip(ref if isinstance(ref, tuple) else (ref,),
                                   got if isinstance(got, tuple) else (got,)))
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        t_np = best_of(np_fn, args.repeat)
        t_nb = best_of(nb_fn, args.repeat)
        print(f"{name:<16}{size:<22}{t_np * 1e3:>10.2f}{t_nb * 1e3:>10.2f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
