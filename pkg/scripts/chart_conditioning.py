"""How the chart round trip loses digits as nested clusters shrink.

Samples interior normal forms with u uniform on (0, 1), bins them by the
smallest relative cluster scale and reports the worst decompose(realize(p))
error per bin, next to machine epsilon divided by that scale.
"""

import argparse

import numpy as np

from fmoperad.fm import decompose, fm_error, realize, smallest_scale
from fmoperad.sampling import random_normal_form


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--tol", type=float, default=1e-10)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    eps = np.finfo(float).eps
    bins: dict[int, list[float]] = {}
    over = 0
    for i in range(args.samples):
        p = random_normal_form(1 + i % 3, 2 + i % 4, rng)
        err = fm_error(decompose(realize(p).points, p.rho0), p)
        over += err > args.tol
        bins.setdefault(int(np.floor(np.log10(smallest_scale(p)))), []).append(err)

    print(f"{'scale':>8} {'count':>6} {'worst':>10} {'eps/scale':>10}")
    for b in sorted(bins):
        errs = bins[b]
        print(f"  1e{b:<+4d} {len(errs):>6} {max(errs):>10.2e} {eps / 10.0**b:>10.2e}")
    rate = over / args.samples
    print(f"\n{over}/{args.samples} samples over {args.tol:g}; "
          f"chance of at least one in 1000 draws: {1 - (1 - rate) ** 1000:.0%}")


if __name__ == "__main__":
    main()
