#!/usr/bin/env python3
"""Print a table of (invariants, Den(X, L), derivative, intersection value)
over a small grid, in the layout used for side-by-side comparison with the
explicit low-rank examples.

Usage: python scripts/make_tables.py [--p 3] [--max-rank 2] [--max-val 4]
       [--out text|csv|latex]
"""

import argparse
import itertools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hermsiegel.density import den_poly, derived_den, derived_den_lambda
from hermsiegel.kr import int_almost_selfdual, int_selfdual
from hermsiegel.lattice import lattice_from_invariants
from hermsiegel.ring import field


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--max-rank", type=int, default=2)
    ap.add_argument("--max-val", type=int, default=4)
    ap.add_argument("--out", choices=["text", "csv", "latex"], default="text")
    args = ap.parse_args()
    fld = field(args.p)
    rows = []
    for r in range(1, args.max_rank + 1):
        for invs in itertools.combinations_with_replacement(range(args.max_val + 1), r):
            if sum(invs) > args.max_val:
                continue
            L = lattice_from_invariants(fld, invs)
            pol = den_poly(L)
            if sum(invs) % 2:
                dd = derived_den(L)
                iv = int_selfdual(L).value
            else:
                dd = derived_den_lambda(L)
                iv = int_almost_selfdual(L).value
            rows.append((invs, str(pol), dd, iv))
    if args.out == "csv":
        print("invariants,den,derived,int")
        for invs, pol, dd, iv in rows:
            print(f"\"{' '.join(map(str, invs))}\",\"{pol}\",{dd},{iv}")
    elif args.out == "latex":
        print("\\begin{tabular}{llll}")
        print("invariants & $\\mathrm{Den}(X)$ & derivative & intersection \\\\")
        for invs, pol, dd, iv in rows:
            print(f"$({', '.join(map(str, invs))})$ & ${pol}$ & ${dd}$ & ${iv}$ \\\\")
        print("\\end{tabular}")
    else:
        w = max(len(str(r[0])) for r in rows)
        for invs, pol, dd, iv in rows:
            print(f"{str(invs):<{w}}  den = {pol:<40} derived = {str(dd):<8} int = {iv}")


if __name__ == "__main__":
    main()
