#!/usr/bin/env python3
"""Compare the compiled solver kernels against the pure-Python fallback.

Runs the open-path DP and the heuristic refinement on random instances
with both backends, checks the outputs agree exactly, and prints the
timing table.

    python benchmarks/bench_kernels.py [--hk-sizes 10,12,14] [--refine-n 50]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from storytraj.kernels import available_backends


def timed(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def random_instance(rng, n, dims=3):
    pts = rng.standard_normal((n, dims))
    d = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d, 0.0)
    return (d + d.T) / 2


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--hk-sizes", default="10,12,14",
                        help="comma-separated instance sizes for the exact DP")
    parser.add_argument("--refine-n", type=int, default=50,
                        help="instance size for multi-start NN + 2-opt/Or-opt")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not available; nothing to compare")
        return 1
    rng = np.random.default_rng(args.seed)

    rows = []
    for n in (int(s) for s in args.hk_sizes.split(",")):
        d = random_instance(rng, n)
        times = {}
        results = {}
        for name, mod in backends.items():
            times[name], results[name] = timed(mod.held_karp, d, -1, -1,
                                               repeat=2 if n >= 14 else 3)
        assert results["pure"] == results["cython"], "backends disagree!"
        rows.append((f"held_karp n={n}", times["pure"], times["cython"]))

    n = args.refine_n
    d = random_instance(rng, n)

    def full_heuristic(mod):
        best = None
        for start in range(n):
            order = mod.refine(d, mod.nearest_neighbor(d, start, -1), False)
            cost = sum(d[order[i], order[i + 1]] for i in range(n - 1))
            key = (cost, tuple(order))
            if best is None or key < best:
                best = key
        return best

    times = {}
    results = {}
    for name, mod in backends.items():
        times[name], results[name] = timed(lambda m=mod: full_heuristic(m),
                                           repeat=2)
    assert results["pure"] == results["cython"], "backends disagree!"
    rows.append((f"nn+2opt+oropt n={n} (all starts)", times["pure"],
                 times["cython"]))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'pure':>10}  {'cython':>10}  {'speedup':>8}")
    for label, tp, tc in rows:
        print(f"{label:<{width}}  {tp * 1e3:>8.1f}ms  {tc * 1e3:>8.1f}ms  "
              f"{tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
