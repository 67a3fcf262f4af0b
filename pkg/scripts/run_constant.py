#!/usr/bin/env python3
"""Empirical lower estimates of the stability constant across cone openings,
showing the growth as the opening approaches the degenerate half-plane.

Usage: python scripts/run_constant.py [--trials 100] [--seed 1729]
"""

import argparse
import sys

from coneiso import cones, families


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1729)
    args = ap.parse_args()

    for theta in (1.0, 1.5, 2.0, 2.5, 3.0):
        cone = cones.plane_cone(theta)
        est, _ = families.constant_estimator(cone, args.trials, seed=args.seed,
                                             resolution=1024)
        print(f"opening {theta:0.2f}: constant estimate {est:8.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
