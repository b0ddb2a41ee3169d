"""Nested trees on k leaves, broken down by codimension (number of internal edges)."""

import argparse
from collections import Counter

from fmoperad.trees import enumerate_trees


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=6)
    args = ap.parse_args()
    for k in range(2, args.kmax + 1):
        trees = enumerate_trees(k)
        by_codim = Counter(t.num_edges for t in trees)
        cols = "  ".join(f"codim {c}: {by_codim[c]}" for c in sorted(by_codim))
        print(f"k={k}: {len(trees):6d} trees   {cols}")


if __name__ == "__main__":
    main()
