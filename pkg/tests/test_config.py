import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fmoperad.config import (
    ConfigError,
    GroupElement,
    NormalizedConfig,
    act,
    config_dist,
    is_cluster_free,
    maximal_clusters,
    normalize,
    normalize_array,
    random_orthogonal,
    sphere_param,
)

coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def point_sets(m=st.integers(2, 6), n=st.integers(1, 3)):
    return st.tuples(m, n).flatmap(lambda mn: arrays(float, mn, elements=coords)).filter(
        lambda a: _well_separated(a)
    )


def _well_separated(a):
    diff = a[:, None, :] - a[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    d[np.diag_indices(len(a))] = np.inf
    return d.min() > 1e-3


def test_normalize_two_points_on_line():
    np.testing.assert_allclose(normalize([0.0, 1.0]).points, [[-1.0], [1.0]])


@settings(max_examples=200)
@given(point_sets())
def test_normalize_properties(pts):
    x = normalize(pts)
    np.testing.assert_allclose(x.points.mean(axis=0), 0.0, atol=1e-12)
    assert abs(np.linalg.norm(x.points, axis=1).max() - 1.0) < 1e-12
    assert config_dist(normalize(x.points), x) < 1e-12


@settings(max_examples=100)
@given(point_sets(n=st.just(3)), st.integers(0, 2**32 - 1))
def test_normalize_commutes_with_rotations(pts, seed):
    Q = random_orthogonal(3, np.random.default_rng(seed))
    lhs = normalize(pts @ Q.T).points
    rhs = normalize(pts).points @ Q.T
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


@given(point_sets(), st.floats(0.1, 100), st.floats(-5, 5))
def test_normalize_ignores_translation_and_dilation(pts, lam, shift):
    np.testing.assert_allclose(normalize(lam * pts + shift).points, normalize(pts).points, atol=1e-9)


def test_normalize_rejects_degenerate():
    with pytest.raises(ConfigError):
        normalize([[1.0, 2.0], [1.0, 2.0]])
    with pytest.raises(ConfigError):
        normalize([[0.0], [1.0], [1.0]])
    with pytest.raises(ConfigError):
        NormalizedConfig(np.array([[0.0], [2.0]]))


def test_cluster_free_examples():
    assert is_cluster_free(np.array([[-1.0], [0.0], [1.0]]))
    tight = normalize_array([[-1.0], [-0.99], [1.0]])
    assert not is_cluster_free(tight)
    assert maximal_clusters(tight, 1 / 16) == [frozenset({0, 1})]
    with pytest.raises(ConfigError):
        is_cluster_free(tight, 0.2)


def test_cluster_threshold_is_sharp():
    # pair spread 1/2 of the gap between points; centroid distance D to the third point
    a = 0.01
    pts = np.array([[-a], [a], [1.0]])
    ratio = a / 1.0
    assert not is_cluster_free(pts, ratio * 1.01)
    assert is_cluster_free(pts, ratio * 0.99)


def test_group_action_laws(rng):
    x = normalize(rng.standard_normal((4, 3)))
    g = GroupElement.random(4, 3, rng)
    h = GroupElement.random(4, 3, rng)
    assert config_dist(act(g * h, x), act(g, act(h, x))) < 1e-12
    assert config_dist(act(GroupElement.identity(4, 3), x), x) == 0.0


def test_group_element_validation():
    with pytest.raises(ValueError):
        GroupElement((1, 1), np.eye(2))
    with pytest.raises(ValueError):
        GroupElement((1, 2), 2 * np.eye(2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_param(n, rng):
    for _ in range(50):
        x = normalize(rng.standard_normal((2, n)))
        v = sphere_param(x)
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12
        swapped = act(GroupElement((2, 1), np.eye(n)), x)
        assert np.abs(sphere_param(swapped) + v).max() < 1e-12
    with pytest.raises(ConfigError):
        sphere_param(normalize([[0.0], [1.0], [3.0]]))


def test_normalize_nearly_coincident_pair():
    x = normalize([[0.91575898], [0.91573925]])
    assert np.abs(x.points.mean(axis=0)).max() < 1e-15


def test_config_json_roundtrip(rng):
    import json

    x = normalize(rng.standard_normal((5, 3)))
    obj = json.loads(json.dumps(x.to_json()))
    assert obj["n"] == 3
    assert config_dist(NormalizedConfig.from_json(obj), x) == 0.0
    obj["n"] = 2
    with pytest.raises(ConfigError):
        NormalizedConfig.from_json(obj)
