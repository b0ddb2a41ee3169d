"""Equivariant collar of the boundary of F(k) and its extension into WF(k).

In edge coordinates the collar time ``t in [0, 2]`` rescales every distance
from dissolution: ``1 - u' = (1/2 + t/4) * (1 - u)``.  Boundary points (some
``u = 0``) sit at ``t = 2``; ``t = 0`` reaches the level set ``min u = 1/2``.
The multi-collar coordinate of an edge is ``tau_e = 2 * (1 - u_e)``.
"""

from __future__ import annotations

from fmoperad.fm import FMPoint, InvariantError
from fmoperad.wspace import WPoint, single_vertex

# c_prime times this close to 2 take the single-vertex branch; otherwise a
# rounding error of one ulp would produce an edge of length ~1e-16
SEAM_EPS = 1e-12


def _check_time(t: float, hi: float) -> None:
    if not 0.0 <= t <= hi:
        raise InvariantError("collar_time", f"collar time {t} outside [0, {hi}]")


def collar_apply(t: float, x: FMPoint) -> FMPoint:
    """Push the boundary point ``x`` into the interior for collar time ``t``; ``t = 2`` is the identity."""
    _check_time(t, 2.0)
    if not x.is_boundary:
        raise InvariantError("boundary", "collar_apply needs a boundary point (some u = 0)")
    return _stretch(t, x)


def _stretch(t: float, x: FMPoint) -> FMPoint:
    lift = 0.5 - 0.25 * t
    # written as u + lift*(1-u) so that t = 2 returns u bit-for-bit
    return x.with_u({e: val + lift * (1.0 - val) for e, val in x.u.items()})


def collar_invert(y: FMPoint) -> tuple[float, FMPoint] | None:
    """``(t, x)`` with ``collar_apply(t, x) == y``, or ``None`` when ``y`` is outside the collar."""
    if not y.u:
        return None
    m = min(y.u.values())
    if m > 0.5:
        return None
    t = 2.0 - 4.0 * m
    base = {e: 0.0 if val == m else (val - m) / (1.0 - m) for e, val in y.u.items()}
    return t, y.with_u(base)


def in_collar(y: FMPoint) -> bool:
    return bool(y.u) and min(y.u.values()) <= 0.5


def c_prime(t: float, x: FMPoint) -> WPoint:
    """Collar of ``x`` continued past ``t = 2`` into the tree part of WF via ``beta``."""
    from fmoperad.beta import beta

    _check_time(t, 3.0)
    if not x.is_boundary:
        raise InvariantError("boundary", "c_prime needs a boundary point (some u = 0)")
    if t <= 2.0 + SEAM_EPS:
        return single_vertex(_stretch(min(t, 2.0), x))
    return beta(_stretch(t - 1.0, x))
