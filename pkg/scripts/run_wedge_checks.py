#!/usr/bin/env python3
"""Monte Carlo verification of the trimmed-wedge set identities in the 2D
wedge and the 3D circular cone of half-angle pi/4.

Usage: python scripts/run_wedge_checks.py [--samples 100000] [--seed 1729]
"""

import argparse
import math
import sys

import numpy as np

from coneiso import cones, families


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1729)
    args = ap.parse_args()

    checks = {
        "wedge2d": (cones.wedge2d(),
                    [np.array([0.0, s * t]) for s in (1, -1)
                     for t in (0.02, 0.05, 0.09, 0.14, 0.2)]),
        "circular45": (cones.circular_cone(math.pi / 4),
                       [np.array([0.01 * t, 0.0, s * 0.04 * t])
                        for s in (1, -1) for t in range(1, 6)]),
    }
    worst = 0
    for name, (cone, ys) in checks.items():
        rep = families.wedge_identity_check(cone, ys, samples=args.samples,
                                            seed=args.seed)
        print(f"{name}: max witnesses {rep['max_witnesses']} over {len(ys)} shifts "
              f"at {args.samples} samples")
        worst = max(worst, rep["max_witnesses"])
    return 0 if worst == 0 else 2


if __name__ == "__main__":
    sys.exit(main())
