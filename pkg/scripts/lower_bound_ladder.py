"""Witness-ratio lower bounds next to the certified M'-side dimension.

For each k prints ln(beta_{k-1})/ln(beta_k), the same value scaled by the
ambient beta-shift dimension, and its distance to the upper end of the
dimension enclosure.
"""
import argparse
from fractions import Fraction

from knead.hole import IntervalConstraint, equality_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", default="(0)")
    ap.add_argument("--d", default="(1)")
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--k-max", type=int, default=10)
    args = ap.parse_args()
    rep = equality_experiment(IntervalConstraint.parse(args.c, args.d, args.m), Fraction(1, 1000), args.k_max)
    dim = rep.dimension.value
    print(f"family {rep.family}, dimension [{float(dim.lo):.6f}, {float(dim.hi):.6f}], scale {float(rep.scale):.6f}")
    print(f"{'k':>3} {'ratio':>10} {'scaled':>10} {'gap':>10}")
    for r in rep.rows:
        print(f"{r.k:>3} {float(r.ratio.lo):>10.6f} {float(r.scaled.lo):>10.6f} {float(r.gap):>10.6f}")
    print("gaps monotone:", rep.monotone)


if __name__ == "__main__":
    main()
