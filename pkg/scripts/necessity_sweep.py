"""Sweep random instances and count (jet criterion, minimality) outcomes.

An invertible 1-jet criterion together with a failed stationary minimality
check would be a contradiction; the sweep reports how many occurred (expected: 0).

    python scripts/necessity_sweep.py --instances 200 --seed 1
"""
import argparse
import collections
import json
import sys

import numpy as np

from statdisc.jets import necessity_check
from statdisc.quadric import find_levi_direction
from statdisc.sampling import admissible_a, dependent_quadric, random_instance


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dependent-fraction", type=float, default=0.25,
                   help="share of instances drawn from quadrics with A_3 = A_1 + A_2")
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    counts = collections.Counter()
    for _ in range(args.instances):
        if rng.random() < args.dependent_fraction:
            q = dependent_quadric(rng, int(rng.integers(1, 5)))
            b0 = find_levi_direction(q, 64, int(rng.integers(2**31))).b0
            a, V = admissible_a(rng, q, b0), rng.standard_normal(q.n) + 1j * rng.standard_normal(q.n)
        else:
            inst = random_instance(rng)
            q, a, b0, V = inst.q, inst.a, inst.b0, inst.V
        v = necessity_check(q, a, b0, V)
        key = f"jet_{'invertible' if v.jet.invertible else 'singular'}/" \
              f"{'minimal' if v.minimality.minimal else 'not_minimal'}"
        counts[key] += 1
        counts["contradictions"] += not v.consistent
    json.dump(dict(sorted(counts.items())), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 1 if counts["contradictions"] else 0


if __name__ == "__main__":
    sys.exit(main())
