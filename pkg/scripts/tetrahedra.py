#!/usr/bin/env python3
"""Probability that a random face pairing of n tetrahedra is a manifold:
plain sampling next to the sequential importance sampler."""
import argparse

from random3m.complexes import manifold_estimate_naive, manifold_probability_sis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", nargs="+", type=int, default=[2, 4, 8, 16, 32])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--particles", type=int, default=20_000)
    ap.add_argument("--bias", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    for n in a.sizes:
        nv = manifold_estimate_naive(n, a.samples, a.seed + n)
        sq = manifold_probability_sis(n, a.particles, a.seed + n, bias=a.bias)
        print(f"n={n:>3} naive {nv.estimate:.3e} ({nv.nonzero}/{nv.samples})  "
              f"sequential {sq.estimate:.3e} +- {sq.stderr:.1e} (ess {sq.effective_samples:.0f})")


if __name__ == "__main__":
    main()
