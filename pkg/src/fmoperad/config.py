"""Point configurations in R^n modulo translation and positive dilation."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import linkage

from fmoperad.trees import check_perm

DEFAULT_RHO0 = 1.0 / 16.0
NORM_TOL = 1e-12
ORTHO_TOL = 1e-10


class ConfigError(ValueError):
    pass


def _as_points(points) -> np.ndarray:
    arr = np.array(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ConfigError(f"expected an (m, n) array of points, got shape {arr.shape}")
    return arr


def normalize_array(points) -> np.ndarray:
    """Center at the centroid and scale to max norm 1."""
    arr = _as_points(points)
    if arr.shape[0] < 2:
        raise ConfigError("need at least two points")
    centered = arr - arr.mean(axis=0)
    # second pass removes the rounding residue, which the division below would amplify
    centered -= centered.mean(axis=0)
    scale = np.sqrt((centered**2).sum(axis=1)).max()
    if scale == 0.0:
        raise ConfigError("all points coincide")
    out = centered / scale
    if min_pair_distance(out) == 0.0:
        raise ConfigError("configuration has coincident points")
    return out


def min_pair_distance(arr: np.ndarray) -> float:
    diff = arr[:, None, :] - arr[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    d[np.diag_indices(len(arr))] = np.inf
    return float(d.min())


@dataclass(frozen=True, eq=False)
class NormalizedConfig:
    """``m >= 2`` distinct points in R^n with centroid 0 and max norm 1."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = _as_points(self.points)
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)
        m = arr.shape[0]
        if m < 2:
            raise ConfigError("need at least two points")
        if np.abs(arr.mean(axis=0)).max() > NORM_TOL:
            raise ConfigError("centroid is not at the origin")
        if abs(np.sqrt((arr**2).sum(axis=1)).max() - 1.0) > NORM_TOL:
            raise ConfigError("max norm is not 1")
        if min_pair_distance(arr) == 0.0:
            raise ConfigError("configuration has coincident points")

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.m

    def __repr__(self) -> str:
        return f"NormalizedConfig({self.points.tolist()})"

    def to_json(self) -> dict:
        return {"n": self.n, "points": self.points.tolist()}

    @classmethod
    def from_json(cls, obj) -> NormalizedConfig:
        cfg = cls(np.array(obj["points"], dtype=float))
        if cfg.n != int(obj["n"]):
            raise ConfigError(f"declared n={obj['n']} but points live in R^{cfg.n}")
        return cfg


def normalize(points) -> NormalizedConfig:
    return NormalizedConfig(normalize_array(points))


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A pair (sigma, Q) in Sigma_k x O(n); ``perm[i-1]`` is the image of ``i``."""

    perm: tuple[int, ...]
    Q: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        perm = tuple(int(i) for i in self.perm)
        check_perm(perm, len(perm))
        Q = np.array(self.Q, dtype=float, ndmin=2)
        if Q.shape[0] != Q.shape[1]:
            raise ConfigError("Q must be square")
        if np.abs(Q.T @ Q - np.eye(Q.shape[0])).max() > ORTHO_TOL:
            raise ConfigError("Q is not orthogonal")
        Q.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "Q", Q)

    @property
    def k(self) -> int:
        return len(self.perm)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @classmethod
    def identity(cls, k: int, n: int) -> GroupElement:
        return cls(tuple(range(1, k + 1)), np.eye(n))

    @classmethod
    def random(cls, k: int, n: int, rng: np.random.Generator) -> GroupElement:
        perm = tuple(int(i) + 1 for i in rng.permutation(k))
        return cls(perm, random_orthogonal(n, rng))

    def inverse_perm(self) -> tuple[int, ...]:
        inv = [0] * self.k
        for i, s in enumerate(self.perm, start=1):
            inv[s - 1] = i
        return tuple(inv)

    def __mul__(self, other: GroupElement) -> GroupElement:
        """``(self * other)`` acts as ``other`` first, then ``self``."""
        perm = tuple(self.perm[other.perm[i] - 1] for i in range(other.k))
        return GroupElement(perm, self.Q @ other.Q)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of O(n), reflections included."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if rng.random() < 0.5:
        q[:, 0] = -q[:, 0]
    return q


def act_array(perm: Sequence[int], Q: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Point ``perm[i]`` of the result is ``Q`` applied to point ``i``."""
    out = np.empty_like(points)
    out[[p - 1 for p in perm]] = points @ Q.T
    return out


def act(g: GroupElement, x: NormalizedConfig) -> NormalizedConfig:
    if g.k != x.m or g.n != x.n:
        raise ConfigError("group element does not match configuration shape")
    return NormalizedConfig(act_array(g.perm, g.Q, x.points))


def config_dist(x: NormalizedConfig | np.ndarray, y: NormalizedConfig | np.ndarray) -> float:
    """Max over points of the Euclidean distance between corresponding points."""
    a = x.points if isinstance(x, NormalizedConfig) else np.asarray(x)
    b = y.points if isinstance(y, NormalizedConfig) else np.asarray(y)
    if a.shape != b.shape:
        raise ConfigError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sqrt(((a - b) ** 2).sum(axis=1)).max())


def sphere_param(x: NormalizedConfig) -> np.ndarray:
    """Unit vector from point 1 to point 2 of a two-point configuration."""
    if x.m != 2:
        raise ConfigError(f"sphere_param needs exactly 2 points, got {x.m}")
    d = x.points[1] - x.points[0]
    return d / np.linalg.norm(d)


# cluster detection


def dendrogram_nodes(points: np.ndarray) -> list[frozenset[int]]:
    """Index sets (0-based) of the proper single-linkage clusters with at least two points."""
    m = len(points)
    if m < 3:
        return []
    Z = linkage(points, method="single")
    sets: list[frozenset[int]] = [frozenset([i]) for i in range(m)]
    for a, b, _, _ in Z:
        sets.append(sets[int(a)] | sets[int(b)])
    return sets[m:-1]


def cluster_spread(points: np.ndarray, members: Sequence[int]) -> tuple[np.ndarray, float]:
    sub = points[list(members)]
    cent = sub.mean(axis=0)
    return cent, float(np.sqrt(((sub - cent) ** 2).sum(axis=1)).max())


def outside_distance(points: np.ndarray, members: frozenset[int], cent: np.ndarray) -> float:
    """Distance from ``cent`` to the nearest point whose index is not in ``members``."""
    rest = [i for i in range(len(points)) if i not in members]
    return float(np.sqrt(((points[rest] - cent) ** 2).sum(axis=1)).min())


def is_cluster(points: np.ndarray, members: frozenset[int], ratio: float) -> bool:
    cent, spread = cluster_spread(points, sorted(members))
    return spread < ratio * outside_distance(points, members, cent)


def maximal_clusters(points: np.ndarray, ratio: float) -> list[frozenset[int]]:
    """Maximal dendrogram nodes that pass the cluster test, sorted by smallest index."""
    found = [s for s in dendrogram_nodes(points) if is_cluster(points, s, ratio)]
    maximal = [s for s in found if not any(s < t for t in found)]
    return sorted(maximal, key=min)


def _check_ratio(rho0: float) -> None:
    if not 0.0 < rho0 < 0.125:
        raise ConfigError(f"cluster ratio must lie in (0, 1/8), got {rho0}")


def is_cluster_free(x: NormalizedConfig | np.ndarray, rho0: float = DEFAULT_RHO0) -> bool:
    _check_ratio(rho0)
    return cluster_free_at(x.points if isinstance(x, NormalizedConfig) else np.asarray(x), rho0)


def cluster_free_at(points: np.ndarray, ratio: float) -> bool:
    # no range check: samplers use ratios above 1/8 to leave a margin
    return not any(is_cluster(points, s, ratio) for s in dendrogram_nodes(points))
