"""Seeded random points of F_n(k) for tests and experiments."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from fmoperad.collar import collar_apply
from fmoperad.config import DEFAULT_RHO0, NormalizedConfig, cluster_free_at, normalize_array
from fmoperad.fm import FMPoint, theta_compose
from fmoperad.trees import NestedTree, enumerate_trees
from fmoperad.wspace import WPoint

REGIONS = ("interior", "collar", "boundary")
# vertex configurations are drawn cluster-free at this multiple of rho0, so that
# inserting child clusters cannot create spurious ones
CLUSTER_MARGIN = 3.0
MAX_REJECTIONS = 10_000


@lru_cache(maxsize=None)
def _trees(k: int) -> tuple[NestedTree, ...]:
    return tuple(enumerate_trees(k))


def random_tree(k: int, rng: np.random.Generator, non_corolla: bool = False) -> NestedTree:
    trees = _trees(k)[1:] if non_corolla else _trees(k)
    return trees[rng.integers(len(trees))]


def random_config(n: int, m: int, rng: np.random.Generator, rho0: float = DEFAULT_RHO0) -> NormalizedConfig:
    """Rejection-sampled Gaussian configuration, cluster-free with margin."""
    for _ in range(MAX_REJECTIONS):
        pts = normalize_array(rng.standard_normal((m, n)))
        if cluster_free_at(pts, CLUSTER_MARGIN * rho0):
            return NormalizedConfig(pts)
    raise RuntimeError(f"could not sample a cluster-free configuration of {m} points in R^{n}")


def random_normal_form(
    n: int,
    k: int,
    rng: np.random.Generator,
    rho0: float = DEFAULT_RHO0,
    u_range: tuple[float, float] = (0.0, 1.0),
    tree: NestedTree | None = None,
) -> FMPoint:
    """Random tree, random vertex configurations, edge parameters uniform in ``u_range`` (never 0)."""
    tree = tree if tree is not None else random_tree(k, rng)
    configs = {v: random_config(n, tree.valence(v), rng, rho0) for v in tree.vertices}
    lo, hi = u_range
    u = {}
    for e in tree.edges:
        val = 0.0
        while val <= 0.0 or val >= 1.0:
            val = float(rng.uniform(lo, hi))
        u[e] = val
    return FMPoint(n, k, tree, configs, u, rho0)


def random_boundary(n: int, k: int, rng: np.random.Generator, rho0: float = DEFAULT_RHO0) -> FMPoint:
    """theta-composition of interior normal forms along a random non-corolla tree."""
    tree = random_tree(k, rng, non_corolla=True)
    labels = {v: random_normal_form(n, tree.valence(v), rng, rho0) for v in tree.vertices}
    return theta_compose(tree, labels)


def random_sample(n: int, k: int, seed: int, region: str = "interior", rho0: float = DEFAULT_RHO0) -> FMPoint:
    if n < 1 or k < 2:
        raise ValueError(f"need n >= 1 and k >= 2, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    if region == "interior":
        x = random_config(n, k, rng, rho0)
        t = NestedTree(k, [range(1, k + 1)])
        return FMPoint(n, k, t, {t.root: x}, {}, rho0)
    if region == "boundary":
        if k == 2:
            raise ValueError("F(2) has no boundary")
        return random_boundary(n, k, rng, rho0)
    if region == "collar":
        if k == 2:
            raise ValueError("F(2) has no boundary")
        w = random_boundary(n, k, rng, rho0)
        return collar_apply(float(rng.uniform(0.0, 2.0)), w)
    raise ValueError(f"unknown region {region!r}; expected one of {REGIONS}")


def random_label(n: int, k: int, rng: np.random.Generator, rho0: float = DEFAULT_RHO0) -> FMPoint:
    """Any kind of point of F(k): interior, boundary or in the collar, chosen uniformly."""
    if k == 2:
        return random_normal_form(n, 2, rng, rho0)
    region = REGIONS[rng.integers(3)]
    if region == "interior":
        return random_normal_form(n, k, rng, rho0)
    w = random_boundary(n, k, rng, rho0)
    return w if region == "boundary" else collar_apply(float(rng.uniform(0.0, 2.0)), w)


def random_wpoint(n: int, k: int, rng: np.random.Generator, rho0: float = DEFAULT_RHO0) -> WPoint:
    """Random canonical point of WF(k): random tree, arbitrary labels, lengths uniform in (0, 1]."""
    tree = random_tree(k, rng)
    labels = {v: random_label(n, tree.valence(v), rng, rho0) for v in tree.vertices}
    lengths = {e: 1.0 - float(rng.random()) for e in tree.edges}
    return WPoint(n, k, tree, labels, lengths, rho0)
