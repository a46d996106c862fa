#!/usr/bin/env python3
"""Median |H_1(M; Z)| of random genus-2 Heegaard splittings against walk length."""
import argparse
import math

from random3m.betti import homology_trend


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lengths", nargs="+", type=int, default=[100, 1000, 10000])
    ap.add_argument("--walks", type=int, default=100)
    ap.add_argument("--rational-samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    for p in homology_trend(2, a.lengths, a.walks, a.rational_samples, a.seed):
        m = p.median_order
        size = "infinite" if m == float("inf") else f"~10^{math.log10(m):.1f}"
        print(f"L={p.length:>6} median |H1| {size}  rational b1>0: {p.rational_positive}/{p.rational_samples}")


if __name__ == "__main__":
    main()
