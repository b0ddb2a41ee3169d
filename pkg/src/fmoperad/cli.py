"""Command-line harness.

Points travel as JSON on stdin/stdout (or files); ``check-*`` and ``roundtrip``
print a JSON report and exit 1 when any trial fails.  Set ``FMOPERAD_VERBOSE=1``
for progress logging on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from contextlib import nullcontext
from dataclasses import dataclass
from typing import TextIO

from fmoperad import checks
from fmoperad.beta import beta, beta_inverse
from fmoperad.config import DEFAULT_RHO0
from fmoperad.fm import FMPoint, InvariantError, theta_compose
from fmoperad.sampling import REGIONS, random_sample
from fmoperad.trees import NestedTree, TreeError, enumerate_trees, to_dot
from fmoperad.wspace import WPoint, w_compose

log = logging.getLogger("fmoperad")

COMMANDS = (
    "sample",
    "compose",
    "beta",
    "beta-inv",
    "roundtrip",
    "check-axioms",
    "check-equivariance",
    "check-seams",
    "enumerate-strata",
    "export-dot",
)
MAX_CHECK_ARITY = 6


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    k: int = 3
    seed: int = 0
    rho0: float = DEFAULT_RHO0
    tol: float = 1e-9
    trials: int = 100

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.trials < 0:
            raise ValueError("trial count must be nonnegative")


def _read_json(path: str | None, stdin: TextIO):
    text = stdin.read() if path in (None, "-") else open(path).read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvariantError("json", f"malformed JSON: {exc}") from None


def _load_point(obj) -> FMPoint | WPoint:
    if not isinstance(obj, dict):
        raise InvariantError("schema", "expected a JSON object")
    return WPoint.from_json(obj) if "labels" in obj else FMPoint.from_json(obj)


def _dump(obj, out: TextIO) -> None:
    out.write(json.dumps(obj))
    out.write("\n")


def _summary(reports: list[checks.Report]) -> dict:
    return {
        "passed": sum(r.passed for r in reports),
        "failed": sum(r.failed for r in reports),
        "max_error": max((r.max_error for r in reports), default=0.0),
        "trials": sum(r.trials for r in reports),
        "suites": [r.to_json() for r in reports],
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fmoperad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, trials: int = 100, tol: float = 1e-9) -> None:
        p.add_argument("--n", type=int, default=2, help="ambient dimension")
        p.add_argument("--k", type=int, default=3, help="arity")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--rho0", type=float, default=DEFAULT_RHO0)
        p.add_argument("--tol", type=float, default=tol)
        p.add_argument("--trials", type=int, default=trials)

    p = sub.add_parser("sample", help="random point of F_n(k) as JSON")
    common(p)
    p.add_argument("--region", choices=REGIONS, default="interior")
    p.add_argument("--out", default="-")

    p = sub.add_parser("compose", help="compose F- or W-points along a tree (inputs in vertex preorder)")
    p.add_argument("--tree", required=True, help='tree as nested JSON, e.g. "[[1,2],3]"')
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", default="-")

    for name, helptext in (("beta", "F-point JSON -> W-point JSON"), ("beta-inv", "W-point JSON -> F-point JSON")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input", nargs="?", default="-")
        p.add_argument("--out", default="-")

    p = sub.add_parser("roundtrip", help="beta/beta-inverse round trips on seeded samples")
    common(p, trials=1000, tol=1e-9)
    p = sub.add_parser("check-axioms", help="operad morphism, max-length law, collar exactness, freeness")
    common(p, trials=200, tol=1e-10)
    p = sub.add_parser("check-equivariance", help="Sigma_k x O(n) equivariance of beta, theta, w_compose, collar")
    common(p, trials=200, tol=1e-10)
    p = sub.add_parser("check-seams", help="branch agreement and eps-probes at every seam of beta")
    common(p, trials=100, tol=1e-12)

    p = sub.add_parser("enumerate-strata", help="list the nested trees on k leaves")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("export-dot", help="Graphviz text for a tree, F-point or W-point JSON")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--out", default="-")
    return parser


def _open_out(path: str, stdout: TextIO):
    return nullcontext(stdout) if path == "-" else open(path, "w")


def _config(args) -> RunConfig:
    cfg = RunConfig(args.n, args.k, args.seed, args.rho0, args.tol, args.trials)
    if cfg.k > MAX_CHECK_ARITY:
        raise ValueError(f"check commands support k <= {MAX_CHECK_ARITY}")
    return cfg


def run_command(argv: list[str], stdin: TextIO = sys.stdin, stdout: TextIO = sys.stdout) -> int:
    logging.basicConfig(level=logging.INFO if os.environ.get("FMOPERAD_VERBOSE") else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args, stdin, stdout)
    except InvariantError as exc:
        _dump({"error": str(exc), "invariant": exc.invariant}, stdout)
        return 2
    except (TreeError, ValueError) as exc:
        _dump({"error": str(exc)}, stdout)
        return 2


def _dispatch(args, stdin: TextIO, stdout: TextIO) -> int:
    cmd = args.command
    log.info("running %s", cmd)
    if cmd == "sample":
        cfg = RunConfig(args.n, args.k, args.seed, args.rho0, args.tol, args.trials)
        p = random_sample(cfg.n, cfg.k, cfg.seed, args.region, cfg.rho0)
        with _open_out(args.out, stdout) as out:
            _dump(p.to_json(), out)
        return 0

    if cmd == "compose":
        tree = NestedTree.from_json(json.loads(args.tree))
        verts = tree.preorder
        if len(args.inputs) != len(verts):
            raise ValueError(f"tree has {len(verts)} vertices but {len(args.inputs)} inputs were given")
        points = [_load_point(_read_json(path, stdin)) for path in args.inputs]
        if all(isinstance(p, FMPoint) for p in points):
            result = theta_compose(tree, dict(zip(verts, points)))
        elif all(isinstance(p, WPoint) for p in points):
            result = w_compose(tree, dict(zip(verts, points)))
        else:
            raise InvariantError("schema", "cannot mix F-points and W-points")
        with _open_out(args.out, stdout) as out:
            _dump(result.to_json(), out)
        return 0

    if cmd in ("beta", "beta-inv"):
        point = _load_point(_read_json(args.input, stdin))
        if cmd == "beta":
            if not isinstance(point, FMPoint):
                raise InvariantError("schema", "beta expects an F-point")
            result = beta(point)
        else:
            if not isinstance(point, WPoint):
                raise InvariantError("schema", "beta-inv expects a W-point")
            result = beta_inverse(point)
        with _open_out(args.out, stdout) as out:
            _dump(result.to_json(), out)
        return 0

    if cmd == "roundtrip":
        cfg = _config(args)
        rep = checks.roundtrip(cfg.n, cfg.k, cfg.trials, cfg.seed, cfg.tol, cfg.rho0)
        body = rep.to_json()
        _dump({"passed": body["passed"], "failed": body["failed"], "max_error": body["max_error"],
               "trials": body["trials"]}, stdout)
        return 0 if rep.ok else 1

    if cmd == "check-axioms":
        cfg = _config(args)
        reps = [
            checks.operad_morphism(cfg.n, k1, k2, cfg.trials, cfg.seed, cfg.tol, cfg.rho0)
            for k1 in (2, 3)
            for k2 in (2, 3)
        ]
        if cfg.k > 2:
            reps.append(checks.max_length_law(cfg.n, cfg.k, cfg.trials, cfg.seed, rho0=cfg.rho0))
            reps.append(checks.collar_exactness(cfg.n, cfg.k, cfg.trials, cfg.seed, rho0=cfg.rho0))
            reps.append(checks.decomposition_independence(cfg.n, cfg.k, cfg.trials, cfg.seed, rho0=cfg.rho0))
        reps.append(checks.freeness(cfg.n, cfg.k, cfg.trials, cfg.seed, rho0=cfg.rho0))
        summary = _summary(reps)
        _dump(summary, stdout)
        return 0 if summary["failed"] == 0 else 1

    if cmd == "check-equivariance":
        cfg = _config(args)
        reps = list(checks.equivariance(cfg.n, cfg.k, cfg.trials, cfg.seed, cfg.tol, cfg.rho0).values())
        summary = _summary(reps)
        _dump(summary, stdout)
        return 0 if summary["failed"] == 0 else 1

    if cmd == "check-seams":
        cfg = _config(args)
        if cfg.k < 3:
            raise ValueError("seams need k >= 3")
        reps = list(checks.seams(cfg.n, cfg.k, cfg.trials, cfg.seed, cfg.tol, rho0=cfg.rho0).values())
        summary = _summary(reps)
        _dump(summary, stdout)
        return 0 if summary["failed"] == 0 else 1

    if cmd == "enumerate-strata":
        trees = enumerate_trees(args.k)
        codims = Counter(t.num_edges for t in trees)
        _dump({
            "k": args.k,
            "count": len(trees),
            "codim_counts": {str(c): codims[c] for c in sorted(codims)},
            "trees": [{"tree": t.to_json(), "codim": t.num_edges} for t in trees],
        }, stdout)
        return 0

    if cmd == "export-dot":
        obj = _read_json(args.input, stdin)
        if isinstance(obj, list):
            text = to_dot(NestedTree.from_json(obj))
        else:
            point = _load_point(obj)
            if isinstance(point, WPoint):
                text = point.to_dot()
            else:
                text = to_dot(point.tree, {e: f"u={point.u[e]:.6g}" for e in point.tree.edges}, name="F")
        with _open_out(args.out, stdout) as out:
            out.write(text)
        return 0

    raise ValueError(f"unknown command {cmd}")


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
