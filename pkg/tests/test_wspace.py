import json

import pytest

from fmoperad.config import GroupElement
from fmoperad.fm import InvariantError, fm_error, theta_compose
from fmoperad.sampling import random_label, random_normal_form, random_wpoint
from fmoperad.trees import corolla, from_nested, graft
from fmoperad.wspace import (
    WPoint,
    cut_max_edges,
    flatten,
    max_length,
    single_vertex,
    w_act,
    w_compose,
    w_error,
    w_make,
)


def labelled(tree, rng, n=2):
    return {v: random_label(n, tree.valence(v), rng) for v in tree.vertices}


def test_w_make_collapses_zero_edges(rng):
    t = from_nested([[[1, 2], 3], 4])
    e_in, e_out = frozenset({1, 2}), frozenset({1, 2, 3})
    labels = labelled(t, rng)
    w = w_make(t, labels, {e_in: 0.0, e_out: 0.5})
    assert w.tree == from_nested([[1, 2, 3], 4])
    assert w.lengths == {e_out: 0.5}
    sub = from_nested([[1, 2], 3])
    expected = theta_compose(sub, {sub.root: labels[e_out], e_in: labels[e_in]})
    assert fm_error(w.labels[e_out], expected) == 0.0


def test_w_make_all_zero_is_flatten(rng):
    t = from_nested([[1, 2], [3, 4]])
    labels = labelled(t, rng)
    w = w_make(t, labels, {e: 0.0 for e in t.edges})
    assert w.is_single_vertex
    assert fm_error(w.label, theta_compose(t, labels)) == 0.0


def test_w_make_validates(rng):
    t = from_nested([[1, 2], 3])
    labels = labelled(t, rng)
    with pytest.raises(InvariantError):
        w_make(t, labels, {frozenset({1, 2}): 1.5})
    with pytest.raises(InvariantError):
        WPoint(2, 3, t, labels, {frozenset({1, 2}): 0.0})


def test_w_compose_sets_new_edges_to_one(rng):
    a, b = random_wpoint(2, 3, rng), random_wpoint(2, 2, rng)
    t = graft(corolla(3), 1, corolla(2))
    w = w_compose(t, {t.root: a, frozenset({1, 2}): b})
    assert w.lengths[frozenset({1, 2})] == 1.0
    assert w.k == 4
    assert max_length(w) == 1.0


def test_w_compose_associative(rng):
    for _ in range(50):
        a, b, c = random_wpoint(2, 3, rng), random_wpoint(2, 2, rng), random_wpoint(2, 3, rng)
        t_ab = graft(corolla(3), 2, corolla(2))
        ab = w_compose(t_ab, {t_ab.root: a, frozenset({2, 3}): b})
        t_abc = graft(corolla(4), 3, corolla(3))
        left = w_compose(t_abc, {t_abc.root: ab, frozenset({3, 4, 5}): c})
        t_bc = graft(corolla(2), 2, corolla(3))
        bc = w_compose(t_bc, {t_bc.root: b, frozenset({2, 3, 4}): c})
        t_a = graft(corolla(3), 2, corolla(4))
        right = w_compose(t_a, {t_a.root: a, frozenset({2, 3, 4, 5}): bc})
        assert w_error(left, right) == 0.0


def test_cut_max_edges_rebuilds(rng):
    for k in (3, 4, 5):
        for _ in range(50):
            w = random_wpoint(2, k, rng)
            if w.is_single_vertex:
                with pytest.raises(InvariantError):
                    cut_max_edges(w)
                continue
            top = max_length(w)
            skeleton, parts = cut_max_edges(w)
            assert all(max_length(p) is None or max_length(p) < top for p in parts.values())
            assert w_error(w_compose(skeleton, parts, top), w) == 0.0


def test_flatten_of_single_vertex(rng):
    p = random_normal_form(2, 4, rng)
    assert fm_error(flatten(single_vertex(p)), p) == 0.0


def test_w_act_is_group_action(rng):
    for _ in range(50):
        w = random_wpoint(2, 4, rng)
        g, h = GroupElement.random(4, 2, rng), GroupElement.random(4, 2, rng)
        assert w_error(w_act(g * h, w), w_act(g, w_act(h, w))) < 1e-12
        assert sorted(w_act(g, w).lengths.values()) == sorted(w.lengths.values())


def test_json_roundtrip(rng):
    for _ in range(50):
        w = random_wpoint(3, 5, rng)
        v = WPoint.from_json(json.loads(json.dumps(w.to_json())))
        assert w_error(v, w) <= 1e-15


def test_dot_export(rng):
    w = random_wpoint(2, 4, rng)
    assert w.to_dot().startswith("digraph W")
