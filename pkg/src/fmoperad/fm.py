"""Points of the Fulton-MacPherson space F_n(k) as stratified normal forms.

A normal form is a nested tree, a cluster-free normalized configuration at every
vertex (one point per child, in child order), and a scale parameter
``u_e in [0, 1)`` on every internal edge.  ``u_e = 0`` means the subtree below
``e`` is an infinitesimal cluster; ``u_e -> 1`` dissolves the edge.

In a raw configuration a child cluster ``S`` sits at its attachment point with
radius ``rho0 * u_e * D`` where ``D`` is the distance from the attachment point
to the nearest point outside ``S`` (within the parent's cluster).  The same
ratio ``spread / (rho0 * D)`` is what ``decompose`` reads back, which makes the
chart exactly invertible.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from fmoperad.config import (
    DEFAULT_RHO0,
    ConfigError,
    GroupElement,
    NormalizedConfig,
    _as_points,
    act_array,
    cluster_spread,
    config_dist,
    is_cluster_free,
    maximal_clusters,
    normalize_array,
    outside_distance,
)
from fmoperad.trees import Leafset, NestedTree, TreeError, corolla, cut, substitute

FIXED_POINT_ITERS = 200


class InvariantError(ValueError):
    """An input violates a named invariant; ``invariant`` carries the name."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass(frozen=True, eq=False)
class FMPoint:
    n: int
    k: int
    tree: NestedTree
    configs: Mapping[Leafset, NormalizedConfig] = field(repr=False)
    u: Mapping[Leafset, float] = field(repr=False)
    rho0: float = DEFAULT_RHO0

    def __post_init__(self) -> None:
        if self.k < 2 or self.tree.k != self.k:
            raise InvariantError("arity", f"tree arity {self.tree.k} vs k={self.k}")
        if set(self.configs) != set(self.tree.vertices):
            raise InvariantError("vertex_configs", "configs must be indexed by the tree's vertices")
        for v, x in self.configs.items():
            if x.m != self.tree.valence(v) or x.n != self.n:
                raise InvariantError(
                    "vertex_configs", f"vertex {sorted(v)} needs {self.tree.valence(v)} points in R^{self.n}"
                )
        if set(self.u) != set(self.tree.edges):
            raise InvariantError("edge_u", "scale parameters must be indexed by internal edges")
        for e, val in self.u.items():
            if not 0.0 <= val < 1.0:
                raise InvariantError("edge_u", f"u={val} on edge {sorted(e)} is outside [0, 1)")

    def check_invariants(self) -> None:
        """Also verify that every vertex configuration is cluster-free."""
        for v, x in self.configs.items():
            if not is_cluster_free(x, self.rho0):
                raise InvariantError("cluster_free", f"vertex {sorted(v)} is not cluster-free")

    @property
    def is_boundary(self) -> bool:
        return any(val == 0.0 for val in self.u.values())

    @property
    def min_u(self) -> float | None:
        return min(self.u.values()) if self.u else None

    def with_u(self, u: Mapping[Leafset, float]) -> FMPoint:
        return FMPoint(self.n, self.k, self.tree, self.configs, dict(u), self.rho0)

    def __repr__(self) -> str:
        us = {self.tree.subtree_key(e): self.u[e] for e in self.tree.edges}
        return f"FMPoint(n={self.n}, tree={self.tree.to_json()}, u={us})"

    # serialization

    def to_json(self) -> dict:
        t = self.tree
        return {
            "n": self.n,
            "k": self.k,
            "rho0": self.rho0,
            "tree": t.to_json(),
            "vertex_configs": {t.subtree_key(v): self.configs[v].points.tolist() for v in t.preorder},
            "edge_u": {t.subtree_key(e): self.u[e] for e in t.edges},
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> FMPoint:
        try:
            tree = NestedTree.from_json(obj["tree"])
            configs = {
                tree.vertex_from_subtree_key(key): NormalizedConfig(np.array(pts, dtype=float))
                for key, pts in obj["vertex_configs"].items()
            }
            u = {tree.vertex_from_subtree_key(key): float(val) for key, val in obj["edge_u"].items()}
        except KeyError as exc:
            raise InvariantError("schema", f"missing field {exc}") from None
        except (TreeError, ConfigError) as exc:
            raise InvariantError("schema", str(exc)) from None
        return cls(int(obj["n"]), int(obj["k"]), tree, configs, u, float(obj["rho0"]))


def interior_point(x: NormalizedConfig, rho0: float = DEFAULT_RHO0) -> FMPoint:
    if not is_cluster_free(x, rho0):
        raise InvariantError("cluster_free", "configuration has a cluster; use decompose")
    t = corolla(x.m)
    return FMPoint(x.n, x.m, t, {t.root: x}, {}, rho0)


def _check_compatible(p: FMPoint, q: FMPoint) -> None:
    if (p.n, p.k, p.rho0) != (q.n, q.k, q.rho0):
        raise InvariantError("parameters", f"(n, k, rho0) mismatch: {(p.n, p.k, p.rho0)} vs {(q.n, q.k, q.rho0)}")


# realization and its inverse


def _cluster_scales(x: np.ndarray, blobs: dict[int, np.ndarray], u: dict[int, float], rho0: float) -> dict[int, float]:
    """Solve ``s_j = rho0 * u_j * D_j(s)`` for the cluster radii at one vertex.

    ``D_j`` depends on the other clusters' radii with Lipschitz constant 1, so
    the map is a contraction with factor below ``rho0`` and plain iteration
    converges to its unique fixed point.
    """
    m = len(x)
    s = {j: 0.0 for j in blobs}
    for _ in range(FIXED_POINT_ITERS):
        new = {}
        for j in blobs:
            best = np.inf
            for i in range(m):
                if i == j:
                    continue
                if i in blobs:
                    pts = x[i] + s[i] * blobs[i]
                    d = np.sqrt(((pts - x[j]) ** 2).sum(axis=1)).min()
                else:
                    d = np.sqrt(((x[i] - x[j]) ** 2).sum())
                best = min(best, d)
            new[j] = rho0 * u[j] * best
        if new == s:
            break
        s = new
    return s


def _realize_at(p: FMPoint, v: Leafset, floor: float) -> np.ndarray:
    """Normalized realization of the subtree at ``v``; rows follow ascending leaf labels."""
    x = p.configs[v].points
    ch = p.tree.children(v)
    blobs: dict[int, np.ndarray] = {}
    us: dict[int, float] = {}
    for j, c in enumerate(ch):
        if c in p.tree.vertices:
            val = max(p.u[c], floor)
            if val <= 0.0:
                raise InvariantError("interior", "boundary points (some u = 0) have no configuration")
            blobs[j] = _realize_at(p, c, floor)
            us[j] = val
    s = _cluster_scales(x, blobs, us, p.rho0)
    pos: dict[int, np.ndarray] = {}
    for j, c in enumerate(ch):
        if j in blobs:
            for leaf, row in zip(sorted(c), x[j] + s[j] * blobs[j]):
                pos[leaf] = row
        else:
            pos[next(iter(c))] = x[j]
    return normalize_array(np.array([pos[leaf] for leaf in sorted(v)]))


def realize(p: FMPoint) -> NormalizedConfig:
    """The normalized configuration of ``k`` points represented by an interior normal form."""
    return NormalizedConfig(_realize_at(p, p.tree.root, 0.0))


def probe_realize(p: FMPoint, floor: float = 1e-3) -> np.ndarray:
    """Realization with every ``u`` raised to at least ``floor``.

    Continuous in the normal-form coordinates, defined on the boundary too;
    used as a test metric near seams.
    """
    return _realize_at(p, p.tree.root, floor)


def smallest_scale(p: FMPoint) -> float:
    """Rough size of the tightest realized cluster relative to the whole configuration.

    Product of ``rho0 * u`` over the chain of edges containing each edge; the
    separation factor (at most 2) is ignored.  In double precision a realized
    configuration resolves the normal form to roughly ``eps / smallest_scale``.
    """
    best = 1.0
    for e in p.tree.edges:
        scale = 1.0
        for w in p.tree.edges:
            if e <= w:
                scale *= p.rho0 * p.u[w]
        best = min(best, scale)
    return best


def decompose(points, rho0: float = DEFAULT_RHO0) -> FMPoint:
    """Normal form of a raw configuration of distinct points (rows labelled 1..k)."""
    arr = _as_points(points)
    k, n = arr.shape
    if k < 2:
        raise ConfigError("need at least two points")
    configs: dict[Leafset, NormalizedConfig] = {}
    u: dict[Leafset, float] = {}

    def rec(raw: np.ndarray, labels: list[int]) -> None:
        P = normalize_array(raw)
        units: list[tuple[int, np.ndarray]] = []
        in_cluster: set[int] = set()
        for S in maximal_clusters(P, rho0):
            members = sorted(S)
            cent, spread = cluster_spread(P, members)
            dist = outside_distance(P, S, cent)
            sub_labels = [labels[i] for i in members]
            u[frozenset(sub_labels)] = spread / (rho0 * dist)
            rec(P[members], sub_labels)
            units.append((min(sub_labels), cent))
            in_cluster |= S
        units.extend((labels[i], P[i]) for i in range(len(P)) if i not in in_cluster)
        units.sort(key=lambda t: t[0])
        configs[frozenset(labels)] = NormalizedConfig(normalize_array(np.array([c for _, c in units])))

    rec(arr, list(range(1, k + 1)))
    tree = NestedTree(k, configs)
    return FMPoint(n, k, tree, configs, u, rho0)


# operad structure


def theta_compose(tree: NestedTree, labels: Mapping[Leafset, FMPoint]) -> FMPoint:
    """Operad composition along ``tree``: splice each label into its vertex.

    Edges of ``tree`` become infinitesimal (``u = 0``); edges inside labels keep
    their parameters.  Leaves are those of ``tree``.
    """
    first = next(iter(labels.values()))
    for v in tree.vertices:
        lab = labels[v]
        if lab.k != tree.valence(v):
            raise InvariantError("arity", f"vertex {sorted(v)} has valence {tree.valence(v)}, label arity {lab.k}")
        if (lab.n, lab.rho0) != (first.n, first.rho0):
            raise InvariantError("parameters", "labels disagree on n or rho0")
    new_tree, where = substitute(tree, {v: labels[v].tree for v in tree.vertices})
    configs: dict[Leafset, NormalizedConfig] = {}
    u: dict[Leafset, float] = {}
    for v in tree.vertices:
        lab = labels[v]
        for w in lab.tree.vertices:
            configs[where[(v, w)]] = lab.configs[w]
        for e in lab.tree.edges:
            u[where[(v, e)]] = lab.u[e]
    for e in tree.edges:
        u[e] = 0.0
    return FMPoint(first.n, tree.k, new_tree, configs, u, first.rho0)


def split(p: FMPoint, edges) -> tuple[NestedTree, dict[Leafset, FMPoint]]:
    """Inverse of ``theta_compose``: cut ``p`` along ``edges``.

    Returns the skeleton tree and the fragment at each skeleton vertex; the
    parameters on the cut edges are dropped.
    """
    skeleton, parts = cut(p.tree, edges)
    out: dict[Leafset, FMPoint] = {}
    for v, (ptree, back) in parts.items():
        configs = {w: p.configs[back[w]] for w in ptree.vertices}
        u = {e: p.u[back[e]] for e in ptree.edges}
        out[v] = FMPoint(p.n, ptree.k, ptree, configs, u, p.rho0)
    return skeleton, out


def zero_edges(p: FMPoint) -> list[Leafset]:
    return [e for e in p.tree.edges if p.u[e] == 0.0]


def stratum_of(p: FMPoint) -> NestedTree:
    """The tree of the stratum containing ``p``: only the infinitesimal edges survive."""
    return NestedTree(p.k, {p.tree.root, *zero_edges(p)})


def vertex_action(g: GroupElement, tree: NestedTree) -> tuple[NestedTree, dict[Leafset, tuple[Leafset, GroupElement]]]:
    """Image tree under ``g.perm``, and per vertex its image plus the induced action on its children."""
    def img(s: Leafset) -> Leafset:
        return frozenset(g.perm[i - 1] for i in s)

    new_tree = NestedTree(tree.k, [img(v) for v in tree.vertices])
    out: dict[Leafset, tuple[Leafset, GroupElement]] = {}
    for v in tree.vertices:
        nv = img(v)
        order = {c: idx for idx, c in enumerate(new_tree.children(nv), start=1)}
        out[v] = (nv, GroupElement(tuple(order[img(c)] for c in tree.children(v)), g.Q))
    return new_tree, out


def act(g: GroupElement, p: FMPoint) -> FMPoint:
    """Relabel leaves by ``g.perm`` and apply ``g.Q`` to every vertex configuration."""
    if g.k != p.k or g.n != p.n:
        raise InvariantError("parameters", "group element does not match the point")
    tree, induced = vertex_action(g, p.tree)
    configs = {}
    for v, (nv, h) in induced.items():
        configs[nv] = NormalizedConfig(act_array(h.perm, h.Q, p.configs[v].points))
    u = {induced[e][0]: val for e, val in p.u.items()}
    return FMPoint(p.n, p.k, tree, configs, u, p.rho0)


def approx_eq(p: FMPoint, q: FMPoint, tol: float) -> bool:
    _check_compatible(p, q)
    if p.tree != q.tree:
        return False
    if any(config_dist(p.configs[v], q.configs[v]) > tol for v in p.tree.vertices):
        return False
    return all(abs(p.u[e] - q.u[e]) <= tol for e in p.tree.edges)


def fm_error(p: FMPoint, q: FMPoint) -> float:
    """Largest coordinate discrepancy between two points on the same tree, ``inf`` otherwise."""
    _check_compatible(p, q)
    if p.tree != q.tree:
        return float("inf")
    errs = [config_dist(p.configs[v], q.configs[v]) for v in p.tree.vertices]
    errs += [abs(p.u[e] - q.u[e]) for e in p.tree.edges]
    return max(errs)
