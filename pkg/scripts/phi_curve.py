"""Dimension of M'_{0,d} as d runs over all binary words of a given length.

Writes CSV (literal, lower, upper, k, converged, class) to stdout or --out;
plot lower/upper against the row index to see the staircase.
"""
import argparse
import sys

from knead.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--length", type=int, default=6)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--tol", default="1e-2")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    argv = ["phi-curve", "--m", str(args.m), "--length", str(args.length), "--tol", args.tol]
    if args.out:
        argv += ["--out", args.out]
    return main(argv)


if __name__ == "__main__":
    sys.exit(run())
