"""The equivariant operad isomorphism beta: F(k) -> WF(k) and its inverse.

Outside the open collar beta is the inclusion F(k) in WF(k).  On the collar
``y = c(t, w)``:

* ``t in [0, 1]``: the single vertex ``c(2t, w)``;
* ``t in [1, 2]``: ``w`` is cut along all of its infinitesimal edges into
  interior fragments ``x_i``; each fragment becomes a labelled tree according
  to :func:`fragment_image` and the trees are grafted back with new edges of
  length ``t - 1``.

The recursion into ``c_prime`` only ever happens at the arity of a fragment,
which is strictly smaller than ``k`` because the cut tree has an edge.
"""

from __future__ import annotations

from collections.abc import Iterable

from fmoperad.collar import _stretch, c_prime, collar_invert
from fmoperad.fm import FMPoint, InvariantError, split, theta_compose, zero_edges
from fmoperad.trees import Leafset
from fmoperad.wspace import WPoint, cut_max_edges, max_length, single_vertex, w_compose


def beta(p: FMPoint) -> WPoint:
    if p.k == 2:
        return single_vertex(p)
    inv = collar_invert(p)
    if inv is None:
        return single_vertex(p)
    t, w = inv
    if t <= 1.0:
        return single_vertex(_stretch(2.0 * t, w))
    return graft_fragments(w, t)


def graft_fragments(w: FMPoint, t: float, edges: Iterable[Leafset] | None = None) -> WPoint:
    """The ``t in [1, 2]`` branch: cut the boundary point ``w`` and graft the fragment images.

    ``edges`` defaults to all infinitesimal edges of ``w``; a subset gives a
    coarser decomposition, whose fragments may themselves lie on the boundary.
    """
    cuts = zero_edges(w) if edges is None else list(edges)
    skeleton, frags = split(w, cuts)
    parts = {v: fragment_image(x, t) for v, x in frags.items()}
    return w_compose(skeleton, parts, t - 1.0)


def fragment_image(x: FMPoint, t: float) -> WPoint:
    """Labelled tree attached to one fragment ``x`` at outer collar time ``t``."""
    inv = collar_invert(x)
    if inv is None:
        return single_vertex(x)
    s, z = inv
    if s <= 1.0:
        return single_vertex(_stretch(s * t, z))
    return c_prime(min(s + t - 1.0, 3.0), z)


def fragment_case(x: FMPoint) -> int:
    """Which of the three fragment cases applies: 0 outside the collar, 1 for s <= 1, 2 otherwise."""
    inv = collar_invert(x)
    if inv is None:
        return 0
    return 1 if inv[0] <= 1.0 else 2


def beta_inverse(w: WPoint) -> FMPoint:
    if w.is_single_vertex:
        y = w.label
        if y.k == 2:
            return y
        inv = collar_invert(y)
        if inv is None:
            return y
        tau, base = inv
        return _stretch(tau / 2.0, base)
    t = max_length(w) + 1.0
    skeleton, parts = cut_max_edges(w)
    frags = {v: fragment_preimage(part, t) for v, part in parts.items()}
    return _stretch(t, theta_compose(skeleton, frags))


def fragment_preimage(part: WPoint, t: float) -> FMPoint:
    """Inverse of :func:`fragment_image` at outer collar time ``t``.

    Single-vertex images are told apart by the collar time ``tau`` of their
    label: ``tau <= t`` came from ``s = tau / t``, ``tau > t`` from
    ``s = tau - t + 1``.  Images with edges came through ``beta`` at inner time
    ``s + t - 2``.
    """
    if part.is_single_vertex:
        g = part.label
        inv = collar_invert(g)
        if inv is None:
            return g
        tau, z = inv
        s = tau / t if tau <= t else tau - t + 1.0
        return _stretch(s, z)
    inner = beta_inverse(part)
    inv = collar_invert(inner)
    if inv is None:
        raise InvariantError("collar", "a fragment tree must come from the collar")
    t_inner, z = inv
    return _stretch(t_inner - t + 2.0, z)
