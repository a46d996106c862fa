#!/usr/bin/env python3
"""Schur-class split of surface epimorphisms: exact counts against a uniform
sample, for several genera."""
import argparse

import numpy as np

from random3m.catalog import schur_cover
from random3m.epi import homology_class, random_surface_epimorphisms, surface_epimorphism_class_counts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="PSL(2,5)")
    ap.add_argument("--genera", nargs="+", type=int, default=[2, 3, 4, 5])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cover = schur_cover(a.group)
    k = len(cover.h2)
    for g in a.genera:
        exact = surface_epimorphism_class_counts(a.group, g, cover)
        frac = [float(x) for x in exact / exact.sum()]
        T = random_surface_epimorphisms(a.group, g, a.samples, a.seed + g)
        f = np.bincount(homology_class(T, cover), minlength=k) / a.samples
        sd = np.sqrt(np.array(frac) * (1 - np.array(frac)) / a.samples)
        print(f"g={g} exact {np.round(frac, 5).tolist()} sampled {f.round(4).tolist()} "
              f"z={((f - frac) / sd).round(2).tolist()} (uniform = {1 / k:.3f})")


if __name__ == "__main__":
    main()
