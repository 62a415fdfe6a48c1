"""Time the sweep backends and the brute-force oracle on convex supports in [n]^2.

Each size rasterises the same random shapes, so ratios reflect resolution only.

Usage: python scripts/bench_erosion.py [--sizes 256 512 1024 2048] [--shapes 6] [--seed 0]
"""

import argparse
import timeit

import numpy as np

from dyncurv.erosion import dilated_acd_modules, erosion_distance, erosion_distance_oracle


def best_of(fn, number, repeat=5):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def table(title, sizes, fam, timer):
    print(title)
    print(f"{'n':>6} {'seconds':>12} {'ratio':>7}")
    prev = None
    for n in sizes:
        t = sum(timer(A[n], B[n]) for A, B in fam)
        print(f"{n:>6} {t:>12.3e} {'' if prev is None else f'{t / prev:7.2f}'}")
        prev = t
    print()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024, 2048])
    ap.add_argument("--oracle-sizes", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--shapes", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    sizes = sorted(set(args.sizes) | set(args.oracle_sizes))
    fam = [(dilated_acd_modules(sizes, 2, rng, max_gens=8), dilated_acd_modules(sizes, 2, rng, max_gens=8))
           for _ in range(args.shapes)]

    for backend, number in (("numba", 20), ("python", 2)):
        A, B = fam[0]
        erosion_distance(A[sizes[0]], B[sizes[0]], backend=backend, validate=False)  # compile / warm up
        table(f"sweep ({backend}), {args.shapes} shape pairs", args.sizes, fam,
              lambda V, W: best_of(lambda: erosion_distance(V, W, backend=backend, validate=False), number))
    table("oracle", args.oracle_sizes, fam,
          lambda V, W: best_of(lambda: erosion_distance_oracle(V, W, budget=10**8), 1, repeat=3))

if __name__ == "__main__":
    main()
