import itertools
import json

import pytest
import sympy
from hypothesis import given, strategies as st

from fmoperad.trees import (
    NestedTree,
    TreeError,
    act_perm,
    canonical_key,
    collapse,
    corolla,
    cut,
    enumerate_trees,
    from_nested,
    graft,
    graft_edge,
    substitute,
    to_dot,
)


def schroeder_counts(kmax):
    """Labelled series-reduced rooted trees from the EGF equation exp(A) = 1 + 2A - x."""
    x = sympy.symbols("x")
    A = x
    for _ in range(kmax):
        A = sympy.series(x + sympy.exp(A) - 1 - A, x, 0, kmax + 1).removeO()
    return {k: int(A.coeff(x, k) * sympy.factorial(k)) for k in range(2, kmax + 1)}


def count_by_partitions(k):
    """Independent count: a tree is a set partition into >= 2 blocks, each carrying a tree."""
    from functools import lru_cache

    from sympy.utilities.iterables import multiset_partitions

    @lru_cache(maxsize=None)
    def f(m):
        if m == 1:
            return 1
        total = 0
        for part in multiset_partitions(list(range(m))):
            if len(part) >= 2:
                prod = 1
                for block in part:
                    prod *= f(len(block))
                total += prod
        return total

    return f(k)


def test_graft_smallest_cases():
    c2 = corolla(2)
    assert graft(c2, 1, c2) == from_nested([[1, 2], 3])
    assert graft(c2, 2, c2) == from_nested([1, [2, 3]])
    t = graft(from_nested([[1, 2], 3]), 3, c2)
    assert t.k == 4 and t.num_edges == 2
    assert graft_edge(3, 2) in t.vertices


def test_graft_rejects_bad_leaf():
    with pytest.raises(TreeError):
        graft(corolla(2), 3, corolla(2))


def test_enumeration_small_counts():
    assert len(enumerate_trees(2)) == 1
    trees3 = enumerate_trees(3)
    assert len(trees3) == 4
    assert sum(t.num_edges == 1 for t in trees3) == 3
    assert len(enumerate_trees(4)) == 26


def test_enumeration_matches_oracles():
    egf = schroeder_counts(6)
    for k in range(2, 7):
        trees = enumerate_trees(k)
        assert len(trees) == egf[k] == count_by_partitions(k)
        assert len({canonical_key(t) for t in trees}) == len(trees)


def test_enumeration_range_guard():
    with pytest.raises(TreeError):
        enumerate_trees(1)
    with pytest.raises(TreeError):
        enumerate_trees(9)


def test_enumeration_deterministic():
    assert enumerate_trees(4) == enumerate_trees(4)


def test_act_perm_examples():
    t = from_nested([[1, 2], 3])
    assert act_perm((1, 2, 3), t) == t
    assert act_perm((2, 1, 3), t) == t
    swapped = act_perm((3, 2, 1), t)
    assert swapped == from_nested([[3, 2], 1])
    assert canonical_key(swapped) != canonical_key(t)


def test_canonical_key_is_unplanar():
    assert canonical_key(from_nested([[1, 2], 3])) == canonical_key(from_nested([3, [2, 1]]))
    assert canonical_key(from_nested([[1, 2], 3])) != canonical_key(from_nested([1, [2, 3]]))


def _compose_laws(t1, t2, t3):
    k1, k2, k3 = t1.k, t2.k, t3.k
    for i in range(1, k1 + 1):
        left = graft(t1, i, t2)
        for j in range(1, left.k + 1):
            lhs = graft(left, j, t3)
            if j < i:
                rhs = graft(graft(t1, j, t3), i + k3 - 1, t2)
            elif j < i + k2:
                rhs = graft(t1, i, graft(t2, j - i + 1, t3))
            else:
                rhs = graft(graft(t1, j - k2 + 1, t3), i, t2)
            assert lhs == rhs, (t1, i, t2, j, t3)


def test_graft_associativity_exhaustive():
    small = [t for k in (2, 3) for t in enumerate_trees(k)]
    for t1, t2, t3 in itertools.product(small, repeat=3):
        if t1.k + t2.k + t3.k - 2 <= 5:
            _compose_laws(t1, t2, t3)


perms4 = st.permutations([1, 2, 3, 4])


@given(perms4, perms4, st.sampled_from(enumerate_trees(4)))
def test_act_perm_is_group_action(sigma, tau, tree):
    composed = tuple(sigma[tau[i] - 1] for i in range(4))
    assert act_perm(composed, tree) == act_perm(sigma, act_perm(tau, tree))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_edges_are_vertices_minus_one(k):
    for t in enumerate_trees(k):
        assert t.num_edges == len(t.vertices) - 1 == len(t.edges)
        assert all(t.valence(v) >= 2 for v in t.vertices)


def test_invalid_trees_rejected():
    with pytest.raises(TreeError):
        from_nested([[1], 2])
    with pytest.raises(TreeError):
        from_nested([[1, 2], 4])
    with pytest.raises(TreeError):
        NestedTree(4, [{1, 2, 3, 4}, {1, 2}, {2, 3}])


@pytest.mark.parametrize("k", [3, 4, 5])
def test_cut_then_substitute_rebuilds(k):
    for t in enumerate_trees(k):
        for r in range(len(t.edges) + 1):
            for edges in itertools.combinations(t.edges, r):
                skeleton, parts = cut(t, edges)
                assert set(skeleton.edges) == set(edges)
                rebuilt, _ = substitute(skeleton, {v: p for v, (p, _) in parts.items()})
                assert rebuilt == t
                assert collapse(t, set(t.edges) - set(edges)) == skeleton


def test_json_and_dot():
    t = from_nested([[1, [4, 2]], [3, 5]])
    assert NestedTree.from_json(json.loads(json.dumps(t.to_json()))) == t
    assert t.to_json() == [[1, [2, 4]], [3, 5]]
    dot = to_dot(t)
    assert dot.count("shape=box") == 5 and dot.count("shape=circle") == 4
