"""Window profiles and normalized mixing times for the lazy constant family, k = n/2."""
import argparse
import math

import numpy as np

from circlewalk.kernels import ChainModel, StepDistribution
from circlewalk.mixing import cutoff_sweep

LAZY = StepDistribution({-1: 0.25, 0: 0.5, 1: 0.25})


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ns", default="8,12,16,20")
    args = ap.parse_args()
    ns = [int(v) for v in args.ns.split(",")]
    s_grid = np.arange(-4, 4.01, 1.0)
    sweep = cutoff_sweep((ChainModel(n, n // 2, LAZY) for n in ns), s_grid, [0.25], "lazy")
    print(f"{'n':>4} {'gamma':>10} {'t_0.25':>7} {'t*g/log n':>10}")
    for n, k, g, eps, t, rn, rk in sweep.teps_rows:
        print(f"{n:4d} {g:10.6f} {t:7.0f} {rn:10.4f}")
    print("\nprofile D((log n + s)/gamma)")
    print("   n " + " ".join(f"{s:7.1f}" for s in s_grid))
    for n in ns:
        _, vals = sweep.profile(n)
        print(f"{n:4d} " + " ".join(f"{v:7.4f}" for v in vals))
    print(f"\nlog n / log k at n={ns[-1]}: {math.log(ns[-1]) / math.log(ns[-1] // 2):.3f}")


if __name__ == "__main__":
    main()
