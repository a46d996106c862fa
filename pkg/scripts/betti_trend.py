#!/usr/bin/env python3
"""Frequency of b1 > 0 for abelian covers of random Heegaard splittings as the
walk length grows."""
import argparse

from random3m.betti import betti_trend_experiment, is_non_increasing


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--groups", nargs="+", default=["Z/2", "Z/3"])
    ap.add_argument("--lengths", nargs="+", type=int, default=[100, 1000, 10000])
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    for q in a.groups:
        pts = betti_trend_experiment(q, 2, a.lengths, samples=a.samples, seed=a.seed)
        for p in pts:
            print(f"{q} L={p.length:>6} b1>0: {p.positive}/{p.samples} walks={p.walks} "
                  f"rewriting checks {p.word_route_checked} (overflowed {p.word_route_dropped})")
        print(f"{q} non-increasing: {is_non_increasing(pts)}")


if __name__ == "__main__":
    main()
