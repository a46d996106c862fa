#!/usr/bin/env python3
"""Exact genus-2 orbit decompositions and the resulting p(Q, 2)."""
import argparse

from random3m.covers import exact_expected, exact_p_from_orbits
from random3m.epi import enumerate_A, enumerate_E, orbit_decomposition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("groups", nargs="*", default=["A5", "PSL(2,7)"])
    ap.add_argument("--csv-prefix", default=None, help="write <prefix><group>.csv per group")
    a = ap.parse_args()
    for q in a.groups:
        A, E = enumerate_A(q, 2), enumerate_E(q, 2)
        ot = orbit_decomposition(q, A, E=E)
        print(f"{q}: |A|={len(A)} |E|={len(E)} p={exact_p_from_orbits(ot):.7f} "
              f"E[|phi E & E|]={float(exact_expected(ot)):.5f}")
        for row in ot.rows():
            print("   ", row)
        if a.csv_prefix:
            ot.to_csv(f"{a.csv_prefix}{q}.csv")


if __name__ == "__main__":
    main()
