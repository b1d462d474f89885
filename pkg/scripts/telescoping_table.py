#!/usr/bin/env python3
"""L1 telescoping ratios of the dyadic decomposition, printed as CSV."""

import argparse

from emtransfer.dyadic import Mollifier, telescoping_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, nargs="+", default=[1.0, 1.5, 2.0])
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--lam", type=float, default=1.0)
    args = ap.parse_args()
    print("k,N,ratio,expected,tolerance,pass")
    for k in args.k:
        for n in range(1, args.N + 1):
            print(telescoping_check(k, n, Mollifier(args.lam)).csv_row())


if __name__ == "__main__":
    main()
