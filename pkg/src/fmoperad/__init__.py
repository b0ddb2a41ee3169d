"""Fulton-MacPherson operad, its W-construction, and the equivariant isomorphism between them."""

from fmoperad.trees import NestedTree, corolla, enumerate_trees, graft
from fmoperad.config import GroupElement, NormalizedConfig, normalize
from fmoperad.fm import FMPoint, decompose, realize, theta_compose
from fmoperad.collar import collar_apply, collar_invert, c_prime
from fmoperad.wspace import WPoint, w_compose, w_make
from fmoperad.beta import beta, beta_inverse

__all__ = [
    "NestedTree",
    "corolla",
    "enumerate_trees",
    "graft",
    "GroupElement",
    "NormalizedConfig",
    "normalize",
    "FMPoint",
    "decompose",
    "realize",
    "theta_compose",
    "collar_apply",
    "collar_invert",
    "c_prime",
    "WPoint",
    "w_compose",
    "w_make",
    "beta",
    "beta_inverse",
]
