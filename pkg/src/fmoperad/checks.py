"""Seeded property suites behind the ``check-*`` and ``roundtrip`` commands.

Every suite returns a :class:`Report`.  Reports only aggregate with max and
count, so trials can be evaluated in any order and merged.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from fmoperad.beta import beta, beta_inverse, fragment_image, graft_fragments
from fmoperad.collar import _stretch, c_prime, collar_apply, collar_invert
from fmoperad.config import DEFAULT_RHO0, GroupElement, config_dist
from fmoperad.fm import (
    FMPoint,
    act,
    approx_eq,
    fm_error,
    probe_realize,
    theta_compose,
    vertex_action,
    zero_edges,
)
from fmoperad.sampling import (
    REGIONS,
    random_boundary,
    random_label,
    random_normal_form,
    random_sample,
    random_tree,
    random_wpoint,
)
from fmoperad.trees import NestedTree
from fmoperad.wspace import WPoint, flatten, max_length, single_vertex, w_act, w_compose, w_error

SEAM_EPS = 1e-6
SEAM_PROBE_TOL = 1e-4


@dataclass
class Report:
    name: str
    tol: float
    trials: int = 0
    passed: int = 0
    failed: int = 0
    max_error: float = 0.0
    failures: list[str] = field(default_factory=list)

    def record(self, err: float, detail: str = "") -> None:
        self.trials += 1
        self.max_error = max(self.max_error, err)
        if err <= self.tol:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 5:
                self.failures.append(f"{detail} error={err:.3e}")

    def merge(self, other: Report) -> Report:
        out = Report(f"{self.name}+{other.name}", max(self.tol, other.tol))
        out.trials = self.trials + other.trials
        out.passed = self.passed + other.passed
        out.failed = self.failed + other.failed
        out.max_error = max(self.max_error, other.max_error)
        out.failures = (self.failures + other.failures)[:5]
        return out

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "failed": self.failed,
            "max_error": self.max_error,
            "trials": self.trials,
            "tol": self.tol,
            "failures": self.failures,
        }


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def random_one_edge_tree(k1: int, k2: int, rng: np.random.Generator) -> tuple[NestedTree, frozenset[int]]:
    """One-edge tree with a root of valence ``k1`` and an upper vertex of valence ``k2``."""
    k = k1 + k2 - 1
    upper = frozenset(int(i) + 1 for i in rng.choice(k, size=k2, replace=False))
    tree = NestedTree(k, [range(1, k + 1), upper])
    return tree, upper


# round trips


def roundtrip(n: int, k: int, trials: int, seed: int, tol: float = 1e-9, rho0: float = DEFAULT_RHO0) -> Report:
    """beta_inverse(beta(p)) == p on sampled points, beta(beta_inverse(w)) == w on sampled W-points."""
    rep = Report("roundtrip", tol)
    regions = REGIONS if k > 2 else ("interior",)
    for i in range(trials):
        region = regions[i % len(regions)]
        p = random_sample(n, k, trial_seed(seed, i), region, rho0)
        err = fm_error(beta_inverse(beta(p)), p)
        w = random_wpoint(n, k, trial_rng(seed, i), rho0)
        err = max(err, w_error(beta(beta_inverse(w)), w))
        rep.record(err, f"trial {i} ({region})")
    return rep


# operad structure


def operad_morphism(n: int, k1: int, k2: int, trials: int, seed: int, tol: float = 1e-10,
                    rho0: float = DEFAULT_RHO0) -> Report:
    """beta(x o_T xbar) == beta(x) o_T beta(xbar), with the grafted edge of length exactly 1."""
    rep = Report(f"operad_morphism[{k1},{k2}]", tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        x = random_label(n, k1, rng, rho0)
        xbar = random_label(n, k2, rng, rho0)
        tree, upper = random_one_edge_tree(k1, k2, rng)
        lhs = beta(theta_compose(tree, {tree.root: x, upper: xbar}))
        rhs = w_compose(tree, {tree.root: beta(x), upper: beta(xbar)})
        err = w_error(lhs, rhs)
        if lhs.tree == rhs.tree and lhs.lengths[upper] != 1.0:
            err = float("inf")
        rep.record(err, f"trial {i}")
    return rep


def decomposition_independence(n: int, k: int, trials: int, seed: int, tol: float = 1e-12,
                               rho0: float = DEFAULT_RHO0) -> Report:
    """Cutting along any nonempty subset of the infinitesimal edges gives the same beta."""
    rep = Report("decomposition_independence", tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        w = random_boundary(n, k, rng, rho0)
        t = float(rng.uniform(1.0, 2.0))
        zeros = zero_edges(w)
        full = beta(collar_apply(t, w))
        err = 0.0
        for r in range(1, len(zeros) + 1):
            for subset in itertools.combinations(zeros, r):
                err = max(err, w_error(graft_fragments(w, t, subset), full))
        rep.record(err, f"trial {i}")
    return rep


def max_length_law(n: int, k: int, trials: int, seed: int, tol: float = 1e-12,
                   rho0: float = DEFAULT_RHO0) -> Report:
    rep = Report("max_length_law", tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        w = random_boundary(n, k, rng, rho0)
        t = float(rng.uniform(1.0, 2.0))
        top = max_length(beta(collar_apply(t, w)))
        rep.record(abs((0.0 if top is None else top) - (t - 1.0)), f"trial {i} t={t}")
    return rep


def collar_exactness(n: int, k: int, trials: int, seed: int, tol: float = 1e-12,
                     rho0: float = DEFAULT_RHO0) -> Report:
    """c(2, x) == x, collar_invert inverts collar_apply, and the image is exactly {min u <= 1/2}."""
    rep = Report("collar_exactness", tol)
    for i in range(trials):
        rng = trial_rng(seed, i)
        x = random_boundary(n, k, rng, rho0)
        t = float(rng.uniform(0.0, 2.0))
        err = fm_error(collar_apply(2.0, x), x)
        t_back, x_back = collar_invert(collar_apply(t, x))
        err = max(err, abs(t_back - t), fm_error(x_back, x))
        y = random_label(n, k, rng, rho0)
        inside = bool(y.u) and min(y.u.values()) <= 0.5
        if inside != (collar_invert(y) is not None):
            err = float("inf")
        rep.record(err, f"trial {i}")
    return rep


# equivariance


def equivariance(n: int, k: int, trials: int, seed: int, tol: float = 1e-10,
                 rho0: float = DEFAULT_RHO0) -> dict[str, Report]:
    reps = {name: Report(f"equivariance[{name}]", tol) for name in ("beta", "theta", "w_compose", "collar")}
    for i in range(trials):
        rng = trial_rng(seed, i)
        g = GroupElement.random(k, n, rng)

        p = random_label(n, k, rng, rho0)
        reps["beta"].record(w_error(beta(act(g, p)), w_act(g, beta(p))), f"trial {i}")

        tree = random_tree(k, rng)
        new_tree, induced = vertex_action(g, tree)
        labels = {v: random_label(n, tree.valence(v), rng, rho0) for v in tree.vertices}
        lhs = act(g, theta_compose(tree, labels))
        rhs = theta_compose(new_tree, {nv: act(h, labels[v]) for v, (nv, h) in induced.items()})
        reps["theta"].record(fm_error(lhs, rhs), f"trial {i}")

        parts = {v: random_wpoint(n, tree.valence(v), rng, rho0) for v in tree.vertices}
        lhs_w = w_act(g, w_compose(tree, parts))
        rhs_w = w_compose(new_tree, {nv: w_act(h, parts[v]) for v, (nv, h) in induced.items()})
        reps["w_compose"].record(w_error(lhs_w, rhs_w), f"trial {i}")

        if k > 2:
            x = random_boundary(n, k, rng, rho0)
            t = float(rng.uniform(0.0, 2.0))
            reps["collar"].record(fm_error(collar_apply(t, act(g, x)), act(g, collar_apply(t, x))), f"trial {i}")
    return reps


def freeness(n: int, k: int, trials: int, seed: int, min_gap: float = 1e-6,
             rho0: float = DEFAULT_RHO0) -> Report:
    """No nontrivial permutation fixes a point: error counts the permutations that do.

    Distance is measured in normal-form coordinates; floored realizations are
    useless here because nested boundary clusters shrink geometrically.
    """
    rep = Report("freeness", 0.0)
    regions = REGIONS if k > 2 else ("interior",)
    perms = [p for p in itertools.permutations(range(1, k + 1)) if p != tuple(range(1, k + 1))]
    for i in range(trials):
        p = random_sample(n, k, trial_seed(seed, i), regions[i % len(regions)], rho0)
        fixed = 0
        for perm in perms:
            q = act(GroupElement(perm, np.eye(n)), p)
            if approx_eq(q, p, 1e-9) or fm_error(q, p) <= min_gap:
                fixed += 1
        rep.record(float(fixed), f"trial {i}")
    return rep


# seams


def probe_distance(v: WPoint, w: WPoint) -> float:
    """Distance between the floored realizations of the flattened points."""
    return config_dist(probe_realize(flatten(v)), probe_realize(flatten(w)))


def point_with_fragment(n: int, k: int, s: float, t: float, rng: np.random.Generator,
                        rho0: float = DEFAULT_RHO0) -> tuple[FMPoint, FMPoint]:
    """A collar point ``c(t, y o_T x)`` whose upper fragment is ``x = c(s, z)`` of arity >= 3.

    Returns the point and ``z``.  Needs ``k >= 4``.
    """
    j = int(rng.integers(3, k))
    tree, upper = random_one_edge_tree(k - j + 1, j, rng)
    z = random_boundary(n, j, rng, rho0)
    y = random_normal_form(n, k - j + 1, rng, rho0)
    w = theta_compose(tree, {tree.root: y, upper: _stretch(s, z)})
    return _stretch(t, w), z


def seams(n: int, k: int, trials: int, seed: int, tol: float = 1e-12, eps: float = SEAM_EPS,
          probe_tol: float = SEAM_PROBE_TOL, rho0: float = DEFAULT_RHO0) -> dict[str, Report]:
    """Branch agreement at t = 0, t = 1, s = 0, s = 1 and at the c' seam, plus eps-probes across each."""
    names = ["t=0", "t=1", "s=0", "s=1", "c'=2"]
    reps = {name: Report(f"seam[{name}]", tol) for name in names}
    probes = {name: Report(f"probe[{name}]", probe_tol) for name in names}
    for i in range(trials):
        rng = trial_rng(seed, i)
        w = random_boundary(n, k, rng, rho0)

        # t = 0: outside the open collar vs the inner collar branch
        y = _stretch(0.0, w)
        reps["t=0"].record(w_error(single_vertex(y), single_vertex(_stretch(2.0 * 0.0, w))), f"trial {i}")
        reps["t=0"].record(w_error(beta(y), single_vertex(y)), f"trial {i}")
        probes["t=0"].record(probe_distance(beta(_stretch(-eps, w)), beta(_stretch(eps, w))), f"trial {i}")

        # t = 1: single vertex c(2, w) vs grafted tree with zero-length edges
        reps["t=1"].record(w_error(single_vertex(_stretch(2.0, w)), graft_fragments(w, 1.0)), f"trial {i}")
        probes["t=1"].record(probe_distance(beta(_stretch(1.0 - eps, w)), beta(_stretch(1.0 + eps, w))), f"trial {i}")

        if k < 4:
            continue
        t = float(rng.uniform(1.0, 2.0))
        j = int(rng.integers(3, k))
        z = random_boundary(n, j, rng, rho0)

        # s = 0: case (0) vs case (1)
        x0 = _stretch(0.0, z)
        reps["s=0"].record(w_error(single_vertex(x0), single_vertex(_stretch(0.0 * t, z))), f"trial {i}")
        reps["s=0"].record(w_error(fragment_image(x0, t), single_vertex(x0)), f"trial {i}")

        # s = 1: case (1) vs case (2)
        reps["s=1"].record(w_error(single_vertex(_stretch(1.0 * t, z)), c_prime(1.0 + t - 1.0, z)), f"trial {i}")

        # c' = 2: lower (collar) vs upper (beta) branch
        reps["c'=2"].record(w_error(single_vertex(_stretch(2.0, z)), beta(_stretch(1.0, z))), f"trial {i}")

        for name, s_mid in (("s=0", 0.0), ("s=1", 1.0), ("c'=2", 3.0 - t)):
            seed_pt = trial_seed(seed, i)
            lo, _ = point_with_fragment(n, k, s_mid - eps, t, np.random.default_rng(seed_pt), rho0)
            hi, _ = point_with_fragment(n, k, s_mid + eps, t, np.random.default_rng(seed_pt), rho0)
            probes[name].record(probe_distance(beta(lo), beta(hi)), f"trial {i}")
    out = {}
    for name in names:
        out[name] = reps[name]
        out[f"probe {name}"] = probes[name]
    return out
