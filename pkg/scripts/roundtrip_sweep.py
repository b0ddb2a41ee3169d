"""Round-trip error of beta over a grid of (n, k), with timings."""

import argparse
import time

from fmoperad import checks


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kmax", type=int, default=5)
    args = ap.parse_args()

    print(f"{'n':>2} {'k':>2} {'trials':>7} {'failed':>6} {'max error':>10} {'secs':>6}")
    for n in (1, 2, 3):
        for k in range(2, args.kmax + 1):
            start = time.perf_counter()
            rep = checks.roundtrip(n, k, args.trials, args.seed)
            secs = time.perf_counter() - start
            print(f"{n:>2} {k:>2} {rep.trials:>7} {rep.failed:>6} {rep.max_error:>10.2e} {secs:>6.2f}")


if __name__ == "__main__":
    main()
