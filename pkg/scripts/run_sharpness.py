#!/usr/bin/env python3
"""Reproduce both sharpness families and write tables + log-log plots.

Usage: python scripts/run_sharpness.py [--out-dir results/sharpness]
"""

import argparse
import math
import sys

from coneiso import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/sharpness")
    ap.add_argument("--seed", type=int, default=1729)
    args = ap.parse_args()
    rc = cli.main(["sharpness-theta",
                   "--thetas", ",".join(str(t) for t in
                                        [math.pi / 3, math.pi / 2,
                                         2 * math.pi / 3, 2.8, 3.1]),
                   "--out-dir", f"{args.out_dir}/theta",
                   "--seed", str(args.seed)])
    rc |= cli.main(["sharpness-ellipsoid",
                    "--hs", ",".join(str(h) for h in range(2, 65)),
                    "--out-dir", f"{args.out_dir}/ellipsoid",
                    "--seed", str(args.seed)])
    print(f"tables and SVG plots under {args.out_dir}/")
    return rc


if __name__ == "__main__":
    sys.exit(main())
