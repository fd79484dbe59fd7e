"""Empirical convergence region of the fixed-point solver.

For random quadrics, scale a random admissible direction of ``a`` until the
solver fails and record the largest ratio ``sum|a_j| ||A||_2 / sigma_min(A_b0)``
that still converged, along with ``||X||`` there.

    python scripts/convergence_region.py --instances 50 --seed 0
"""
import argparse
import json
import sys

import numpy as np

from statdisc.errors import SolverFail
from statdisc.pencil import solve_X
from statdisc.sampling import random_quadric
from statdisc.quadric import find_levi_direction


def largest_ratio(q, b0, direction, steps=40):
    sigma = np.linalg.svd(q.combination(b0), compute_uv=False)[-1]
    norm_A = max(np.linalg.norm(Aj, 2) for Aj in q.A)
    unit = direction / np.sum(np.abs(direction)) * sigma / norm_A
    def ok(t):
        try:
            return solve_X(q, t * unit, b0)
        except SolverFail:
            return None

    lo, hi, X_lo = 0.0, 1.0, np.zeros((q.n, q.n))
    while hi < 1e6 and (X := ok(hi)) is not None:
        lo, hi, X_lo = hi, 2 * hi, X
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        X = ok(mid)
        if X is None:
            hi = mid
        else:
            lo, X_lo = mid, X
    return lo, float(np.linalg.norm(X_lo, 2))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--max-d", type=int, default=3)
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    rows = []
    for _ in range(args.instances):
        n, d = int(rng.integers(1, args.max_n + 1)), int(rng.integers(1, args.max_d + 1))
        q = random_quadric(rng, n, d)
        b0 = find_levi_direction(q, 64, int(rng.integers(2**31))).b0
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        ratio, norm_X = largest_ratio(q, b0, z)
        rows.append({"n": n, "d": d, "ratio": ratio, "norm_X": norm_X})
    ratios = np.array([r["ratio"] for r in rows])
    summary = {"instances": len(rows), "min_ratio": ratios.min(), "median_ratio": float(np.median(ratios)),
               "max_norm_X": max(r["norm_X"] for r in rows)}
    json.dump({"summary": summary, "rows": rows}, sys.stdout, indent=2, default=float)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
