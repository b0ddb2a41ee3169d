"""The Boardman-Vogt construction WF_n(k).

A point is a nested tree with an F-point label of matching arity at every
vertex and a length in (0, 1] on every internal edge.  Zero-length edges are
collapsed on construction by composing the labels at their ends, so each point
has a unique representative.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from fmoperad.config import DEFAULT_RHO0, GroupElement
from fmoperad.fm import FMPoint, InvariantError, act, fm_error, theta_compose, vertex_action
from fmoperad.trees import Leafset, NestedTree, corolla, cut, substitute, to_dot


@dataclass(frozen=True, eq=False)
class WPoint:
    n: int
    k: int
    tree: NestedTree
    labels: Mapping[Leafset, FMPoint] = field(repr=False)
    lengths: Mapping[Leafset, float] = field(repr=False)
    rho0: float = DEFAULT_RHO0

    def __post_init__(self) -> None:
        if self.tree.k != self.k:
            raise InvariantError("arity", "tree arity does not match k")
        if set(self.labels) != set(self.tree.vertices):
            raise InvariantError("labels", "labels must be indexed by the tree's vertices")
        for v, lab in self.labels.items():
            if lab.k != self.tree.valence(v):
                raise InvariantError("arity", f"label at {sorted(v)} has arity {lab.k}, valence {self.tree.valence(v)}")
            if (lab.n, lab.rho0) != (self.n, self.rho0):
                raise InvariantError("parameters", "label disagrees on n or rho0")
        if set(self.lengths) != set(self.tree.edges):
            raise InvariantError("lengths", "lengths must be indexed by internal edges")
        for e, val in self.lengths.items():
            if not 0.0 < val <= 1.0:
                raise InvariantError("lengths", f"canonical lengths lie in (0, 1], got {val}")

    @property
    def is_single_vertex(self) -> bool:
        return self.tree.is_corolla

    @property
    def label(self) -> FMPoint:
        """The label of a single-vertex point."""
        if not self.is_single_vertex:
            raise InvariantError("single_vertex", "point has internal edges")
        return self.labels[self.tree.root]

    def __repr__(self) -> str:
        ls = [self.lengths[e] for e in self.tree.edges]
        return f"WPoint(n={self.n}, tree={self.tree.to_json()}, lengths={ls})"

    def to_json(self) -> dict:
        t = self.tree
        return {
            "n": self.n,
            "k": self.k,
            "rho0": self.rho0,
            "tree": t.to_json(),
            "labels": {t.subtree_key(v): self.labels[v].to_json() for v in t.preorder},
            # internal edges in preorder of the canonical tree
            "lengths": [self.lengths[e] for e in t.edges],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> WPoint:
        try:
            tree = NestedTree.from_json(obj["tree"])
            labels = {tree.vertex_from_subtree_key(key): FMPoint.from_json(lab) for key, lab in obj["labels"].items()}
            lengths = [float(x) for x in obj["lengths"]]
        except KeyError as exc:
            raise InvariantError("schema", f"missing field {exc}") from None
        except ValueError as exc:
            raise InvariantError("schema", str(exc)) from None
        if len(lengths) != tree.num_edges:
            raise InvariantError("lengths", f"expected {tree.num_edges} lengths, got {len(lengths)}")
        point = cls(int(obj["n"]), int(obj["k"]), tree, labels, dict(zip(tree.edges, lengths)), float(obj["rho0"]))
        return point

    def to_dot(self) -> str:
        return to_dot(self.tree, {e: f"{self.lengths[e]:.6g}" for e in self.tree.edges}, name="W")


def single_vertex(p: FMPoint) -> WPoint:
    t = corolla(p.k)
    return WPoint(p.n, p.k, t, {t.root: p}, {}, p.rho0)


def w_make(tree: NestedTree, labels: Mapping[Leafset, FMPoint], lengths: Mapping[Leafset, float]) -> WPoint:
    """Canonical point from a labelled tree whose lengths may include zeros."""
    for e, val in lengths.items():
        if not 0.0 <= val <= 1.0:
            raise InvariantError("lengths", f"length {val} outside [0, 1]")
    if set(lengths) != set(tree.edges):
        raise InvariantError("lengths", "lengths must be indexed by internal edges")
    first = next(iter(labels.values()))
    keep = [e for e in tree.edges if lengths[e] > 0.0]
    skeleton, parts = cut(tree, keep)
    new_labels = {}
    for v, (ptree, back) in parts.items():
        new_labels[v] = theta_compose(ptree, {w: labels[back[w]] for w in ptree.vertices})
    return WPoint(first.n, tree.k, skeleton, new_labels, {e: lengths[e] for e in keep}, first.rho0)


def w_compose(tree: NestedTree, parts: Mapping[Leafset, WPoint], length: float = 1.0) -> WPoint:
    """Graft ``parts`` along ``tree``; every edge of ``tree`` gets ``length`` (1 for the operad structure)."""
    for v in tree.vertices:
        if parts[v].k != tree.valence(v):
            raise InvariantError("arity", f"vertex {sorted(v)} has valence {tree.valence(v)}, part arity {parts[v].k}")
    new_tree, where = substitute(tree, {v: parts[v].tree for v in tree.vertices})
    labels: dict[Leafset, FMPoint] = {}
    lengths: dict[Leafset, float] = {}
    for v in tree.vertices:
        part = parts[v]
        for w in part.tree.vertices:
            labels[where[(v, w)]] = part.labels[w]
        for e in part.tree.edges:
            lengths[where[(v, e)]] = part.lengths[e]
    for e in tree.edges:
        lengths[e] = length
    if length == 0.0:
        return w_make(new_tree, labels, lengths)
    first = next(iter(parts.values()))
    return WPoint(first.n, tree.k, new_tree, labels, lengths, first.rho0)


def max_length(w: WPoint) -> float | None:
    return max(w.lengths.values()) if w.lengths else None


def cut_max_edges(w: WPoint) -> tuple[NestedTree, dict[Leafset, WPoint]]:
    """Cut along every edge of maximal length; ``w_compose(T, parts, max_length(w))`` rebuilds ``w``."""
    top = max_length(w)
    if top is None:
        raise InvariantError("single_vertex", "nothing to cut on a single-vertex point")
    skeleton, pieces = cut(w.tree, [e for e, val in w.lengths.items() if val == top])
    out: dict[Leafset, WPoint] = {}
    for v, (ptree, back) in pieces.items():
        labels = {x: w.labels[back[x]] for x in ptree.vertices}
        lengths = {e: w.lengths[back[e]] for e in ptree.edges}
        out[v] = WPoint(w.n, ptree.k, ptree, labels, lengths, w.rho0)
    return skeleton, out


def w_act(g: GroupElement, w: WPoint) -> WPoint:
    """Relabel leaves by ``g.perm`` and rotate every label by ``g.Q``; lengths are untouched."""
    if g.k != w.k or g.n != w.n:
        raise InvariantError("parameters", "group element does not match the point")

    tree, induced = vertex_action(g, w.tree)
    labels = {nv: act(h, w.labels[v]) for v, (nv, h) in induced.items()}
    lengths = {induced[e][0]: val for e, val in w.lengths.items()}
    return WPoint(w.n, w.k, tree, labels, lengths, w.rho0)


def flatten(w: WPoint) -> FMPoint:
    """Forget lengths: compose all labels along the tree (the augmentation WF -> F)."""
    return theta_compose(w.tree, w.labels)


def w_approx_eq(v: WPoint, w: WPoint, tol: float) -> bool:
    return w_error(v, w) <= tol


def w_error(v: WPoint, w: WPoint) -> float:
    if (v.n, v.k, v.rho0) != (w.n, w.k, w.rho0):
        raise InvariantError("parameters", "(n, k, rho0) mismatch")
    if v.tree != w.tree:
        return float("inf")
    errs = [fm_error(v.labels[x], w.labels[x]) for x in v.tree.vertices]
    errs += [abs(v.lengths[e] - w.lengths[e]) for e in v.tree.edges]
    return max(errs)

