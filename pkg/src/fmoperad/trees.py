"""Nested trees on labelled leaves.

A nested tree on leaves ``1..k`` is stored as the laminar family of its vertex
leaf-sets: every vertex is identified with the set of leaves above it, the root
with ``{1..k}``.  Two trees are equal iff they have the same family, so the
representation is unplanar by construction.  Children of a vertex are always
listed in increasing order of their smallest leaf; vertex labels elsewhere in
the package (configurations, sub-operations) index children in this order.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping, Sequence
from functools import cached_property
from itertools import product

Leafset = frozenset[int]

MAX_ENUMERATION_ARITY = 8


class TreeError(ValueError):
    pass


def _minleaf(s: Leafset) -> int:
    return min(s)


class NestedTree:
    """Rooted tree, leaves labelled ``1..k``, every vertex with at least two children."""

    def __init__(self, k: int, vertices: Iterable[Iterable[int]]):
        if k < 2:
            raise TreeError(f"arity must be >= 2, got {k}")
        self.k = int(k)
        self.vertices: frozenset[Leafset] = frozenset(frozenset(v) for v in vertices)
        self._validate()

    def _validate(self) -> None:
        full = frozenset(range(1, self.k + 1))
        if full not in self.vertices:
            raise TreeError("root vertex {1..k} missing")
        for v in self.vertices:
            if len(v) < 2:
                raise TreeError(f"vertex {sorted(v)} has fewer than two leaves")
            if not v <= full:
                raise TreeError(f"vertex {sorted(v)} has leaves outside 1..{self.k}")
        vs = sorted(self.vertices, key=len)
        for a_idx, a in enumerate(vs):
            for b in vs[a_idx + 1 :]:
                if a & b and not a <= b:
                    raise TreeError(f"vertices {sorted(a)} and {sorted(b)} overlap")
        for v in self.vertices:
            if len(self.children(v)) < 2:
                raise TreeError(f"vertex {sorted(v)} is unary")

    # structure

    @property
    def root(self) -> Leafset:
        return frozenset(range(1, self.k + 1))

    @cached_property
    def _parents(self) -> dict[Leafset, Leafset]:
        by_size = sorted(self.vertices, key=len)
        parent: dict[Leafset, Leafset] = {}
        nodes = list(self.vertices) + [frozenset([i]) for i in range(1, self.k + 1)]
        for node in nodes:
            for cand in by_size:
                if len(cand) > len(node) and node < cand:
                    parent[node] = cand
                    break
        return parent

    @cached_property
    def _children(self) -> dict[Leafset, tuple[Leafset, ...]]:
        out: dict[Leafset, list[Leafset]] = {v: [] for v in self.vertices}
        for node, par in self._parents.items():
            out[par].append(node)
        return {v: tuple(sorted(c, key=_minleaf)) for v, c in out.items()}

    def children(self, v: Leafset) -> tuple[Leafset, ...]:
        """Children of ``v`` ordered by smallest leaf; leaves appear as singletons."""
        return self._children[v]

    def parent(self, node: Leafset) -> Leafset:
        return self._parents[node]

    def valence(self, v: Leafset) -> int:
        return len(self._children[v])

    def is_vertex(self, node: Leafset) -> bool:
        return node in self.vertices

    @cached_property
    def preorder(self) -> tuple[Leafset, ...]:
        out: list[Leafset] = []

        def visit(v: Leafset) -> None:
            out.append(v)
            for c in self._children[v]:
                if c in self.vertices:
                    visit(c)

        visit(self.root)
        return tuple(out)

    @property
    def edges(self) -> tuple[Leafset, ...]:
        """Internal edges, each named by its child vertex, in preorder."""
        return self.preorder[1:]

    @property
    def num_edges(self) -> int:
        return len(self.vertices) - 1

    @property
    def is_corolla(self) -> bool:
        return len(self.vertices) == 1

    # identity

    @cached_property
    def key(self) -> tuple:
        def build(node: Leafset):
            if node not in self.vertices:
                return next(iter(node))
            return tuple(build(c) for c in self._children[node])

        return build(self.root)

    def sort_key(self) -> tuple[int, str]:
        return (self.num_edges, json.dumps(self.to_json()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NestedTree):
            return NotImplemented
        return self.k == other.k and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash((self.k, self.vertices))

    def __repr__(self) -> str:
        return f"NestedTree({self.to_json()})"

    # serialization

    def to_json(self) -> list:
        def build(node: Leafset):
            if node not in self.vertices:
                return next(iter(node))
            return [build(c) for c in self._children[node]]

        return build(self.root)

    @classmethod
    def from_json(cls, obj: Sequence) -> NestedTree:
        return from_nested(obj)

    def subtree_key(self, v: Leafset) -> str:
        """JSON text of the subtree at ``v``; used to name vertices and edges in files."""

        def build(node: Leafset):
            if node not in self.vertices:
                return next(iter(node))
            return [build(c) for c in self._children[node]]

        return json.dumps(build(v), separators=(",", ":"))

    def vertex_from_subtree_key(self, text: str) -> Leafset:
        v = frozenset(_leaves_of(json.loads(text)))
        if v not in self.vertices:
            raise TreeError(f"{text} does not name a vertex of {self.to_json()}")
        return v


def _leaves_of(obj) -> list[int]:
    if isinstance(obj, int):
        return [obj]
    out: list[int] = []
    for c in obj:
        out.extend(_leaves_of(c))
    return out


def from_nested(obj: Sequence) -> NestedTree:
    """Build a tree from nested lists of leaf labels, e.g. ``[[1, 2], 3]``."""
    vertices: list[Leafset] = []

    def visit(node) -> Leafset:
        if isinstance(node, int):
            return frozenset([node])
        if len(node) < 2:
            raise TreeError(f"vertex {node!r} has fewer than two children")
        leaves = frozenset().union(*(visit(c) for c in node))
        vertices.append(leaves)
        return leaves

    if isinstance(obj, int):
        raise TreeError("a tree needs at least one vertex")
    allleaves = _leaves_of(obj)
    k = len(allleaves)
    if sorted(allleaves) != list(range(1, k + 1)):
        raise TreeError(f"leaf labels must be exactly 1..{k}, got {sorted(allleaves)}")
    visit(obj)
    return NestedTree(k, vertices)


def corolla(k: int) -> NestedTree:
    return NestedTree(k, [range(1, k + 1)])


def canonical_key(tree: NestedTree) -> tuple:
    return tree.key


def graft_edge(i: int, k2: int) -> Leafset:
    """Name of the new internal edge created by ``graft(T1, i, T2)`` with ``T2`` of arity ``k2``."""
    return frozenset(range(i, i + k2))


def graft(t1: NestedTree, i: int, t2: NestedTree) -> NestedTree:
    """Attach the root of ``t2`` to leaf ``i`` of ``t1``.

    Leaves of ``t2`` become ``i..i+k2-1``; leaves of ``t1`` above ``i`` shift up by ``k2-1``.
    """
    if not 1 <= i <= t1.k:
        raise TreeError(f"leaf index {i} out of range 1..{t1.k}")
    k2 = t2.k
    block = graft_edge(i, k2)

    def f1(j: int) -> int:
        return j if j < i else j + k2 - 1

    verts: list[Leafset] = []
    for v in t1.vertices:
        new = frozenset(f1(j) for j in v if j != i)
        if i in v:
            new |= block
        verts.append(new)
    verts.extend(frozenset(j + i - 1 for j in v) for v in t2.vertices)
    return NestedTree(t1.k + k2 - 1, verts)


def act_perm(sigma: Sequence[int], tree: NestedTree) -> NestedTree:
    """Relabel leaf ``i`` as ``sigma[i-1]``."""
    check_perm(sigma, tree.k)
    return NestedTree(tree.k, [frozenset(sigma[j - 1] for j in v) for v in tree.vertices])


def check_perm(sigma: Sequence[int], k: int) -> None:
    if len(sigma) != k or sorted(sigma) != list(range(1, k + 1)):
        raise TreeError(f"{list(sigma)} is not a permutation of 1..{k}")


def substitute(
    tree: NestedTree, subs: Mapping[Leafset, NestedTree]
) -> tuple[NestedTree, dict[tuple[Leafset, Leafset], Leafset]]:
    """Replace every vertex ``v`` of ``tree`` by the tree ``subs[v]`` of arity ``|v|``.

    Returns the spliced tree and the map ``(v, w) -> new vertex`` for each vertex
    ``w`` of ``subs[v]``.  Edges of ``tree`` survive as edges of the result.
    """
    verts: list[Leafset] = []
    where: dict[tuple[Leafset, Leafset], Leafset] = {}
    for v in tree.vertices:
        sub = subs[v]
        ch = tree.children(v)
        if sub.k != len(ch):
            raise TreeError(f"vertex {sorted(v)} has valence {len(ch)} but got arity {sub.k}")
        for w in sub.vertices:
            new = frozenset().union(*(ch[i - 1] for i in w))
            where[(v, w)] = new
            verts.append(new)
    return NestedTree(tree.k, verts), where


def cut(
    tree: NestedTree, cut_edges: Iterable[Leafset]
) -> tuple[NestedTree, dict[Leafset, tuple[NestedTree, dict[Leafset, Leafset]]]]:
    """Cut ``tree`` along ``cut_edges``.

    Returns the skeleton (one vertex per fragment, with the cut edges as its
    edges) and, per skeleton vertex, the fragment as a tree on the skeleton
    vertex's children together with the map fragment-vertex -> original vertex.
    ``substitute(skeleton, fragments)`` rebuilds ``tree``.
    """
    cuts = frozenset(cut_edges)
    if not cuts <= set(tree.edges):
        raise TreeError("cut set contains something that is not an internal edge")
    skeleton = NestedTree(tree.k, cuts | {tree.root})
    parts: dict[Leafset, tuple[NestedTree, dict[Leafset, Leafset]]] = {}
    owner: dict[Leafset, Leafset] = {}
    for w in tree.preorder:
        owner[w] = w if (w in cuts or w == tree.root) else owner[tree.parent(w)]
    members: dict[Leafset, list[Leafset]] = {v: [] for v in skeleton.vertices}
    for w, v in owner.items():
        members[v].append(w)
    for v, ws in members.items():
        ch = skeleton.children(v)
        back: dict[Leafset, Leafset] = {}
        for w in ws:
            back[frozenset(i + 1 for i, c in enumerate(ch) if c <= w)] = w
        parts[v] = (NestedTree(len(ch), back), back)
    return skeleton, parts


def collapse(tree: NestedTree, edges: Iterable[Leafset]) -> NestedTree:
    """Contract the given internal edges."""
    return NestedTree(tree.k, tree.vertices - frozenset(edges))


def _set_partitions(items: Sequence[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for idx in range(len(part)):
            yield part[:idx] + [[first] + part[idx]] + part[idx + 1 :]


def _families(leaves: tuple[int, ...]) -> Iterator[frozenset[Leafset]]:
    if len(leaves) == 1:
        yield frozenset()
        return
    root = frozenset(leaves)
    for blocks in _set_partitions(list(leaves)):
        if len(blocks) < 2:
            continue
        for choice in product(*(list(_families(tuple(sorted(b)))) for b in blocks)):
            yield frozenset({root}).union(*choice)


def enumerate_trees(k: int) -> list[NestedTree]:
    """All nested trees on ``k`` labelled leaves, sorted by (edge count, JSON form)."""
    if not 2 <= k <= MAX_ENUMERATION_ARITY:
        raise TreeError(f"enumeration supports 2 <= k <= {MAX_ENUMERATION_ARITY}, got {k}")
    trees = [NestedTree(k, fam) for fam in _families(tuple(range(1, k + 1)))]
    return sorted(trees, key=NestedTree.sort_key)


def to_dot(tree: NestedTree, edge_labels: Mapping[Leafset, str] | None = None, name: str = "T") -> str:
    """Graphviz text: leaves as boxes, vertices as circles, edges pointing to the root."""
    edge_labels = edge_labels or {}
    ids = {v: f"v{idx}" for idx, v in enumerate(tree.preorder)}
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for v in tree.preorder:
        lines.append(f'  {ids[v]} [shape=circle,label=""];')
    for i in range(1, tree.k + 1):
        lines.append(f'  l{i} [shape=box,label="{i}"];')
    for v in tree.preorder:
        for c in tree.children(v):
            if c in tree.vertices:
                lab = edge_labels.get(c)
                attr = f' [label="{lab}"]' if lab is not None else ""
                lines.append(f"  {ids[c]} -> {ids[v]}{attr};")
            else:
                lines.append(f"  l{next(iter(c))} -> {ids[v]};")
    lines.append(f'  root [shape=point]; {ids[tree.root]} -> root;')
    lines.append("}")
    return "\n".join(lines) + "\n"
