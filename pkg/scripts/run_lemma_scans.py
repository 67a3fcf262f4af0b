#!/usr/bin/env python3
"""Brute-force scans of the translation-difference bounds on the unit square
(upper ratio f(y)/|y| and the min(c, C|y|) lower bound).

Usage: python scripts/run_lemma_scans.py [--out-dir results/lemmas]
"""

import argparse
import sys

from coneiso import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results/lemmas")
    args = ap.parse_args()
    return cli.main(["lemmas", "--out-dir", args.out_dir])


if __name__ == "__main__":
    sys.exit(main())
