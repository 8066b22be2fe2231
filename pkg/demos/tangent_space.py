"""Derive the first-order deformation equations at a hyperbolic point and compare.

    python demos/tangent_space.py --e 2 --vt 1
"""

import argparse

from rzlab import make_ext, make_field
from rzlab.tangent_calc import (
    DRINFELD_TANGENT_DIM,
    compare_with_listed,
    derive_relations,
    listed_relations,
    tangent_dimension,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--e", type=int, default=1)
    ap.add_argument("--f", type=int, default=1)
    ap.add_argument("--vt", type=int, default=1)
    a = ap.parse_args()
    ext = make_ext(make_field(a.f, a.e), "RU", vt=a.vt)

    derived = derive_relations(ext)
    for name, gens in derived.families.items():
        print(f"{name}:")
        for g in gens:
            print(f"    {g}")
    print("listed generators:")
    for g in listed_relations(ext).generators:
        print(f"    {g}")

    cmp = compare_with_listed(derived)
    print(f"\nideals equal in degree <= 2: {cmp.equal}")
    for line in cmp.syntactic_differences:
        print(f"    note: {line}")
    print(f"tangent dimension {tangent_dimension(derived)} (Drinfeld: {DRINFELD_TANGENT_DIM})")


if __name__ == "__main__":
    main()
