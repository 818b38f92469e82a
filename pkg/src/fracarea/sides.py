"""Interior/exterior labelling of points relative to a base point on a hypersurface.

For ``z`` on ``M`` with normal ``nu`` a point ``y`` is *interior* when the
open segment (z, y] crosses ``M`` an odd number of times and ``y`` lies
on the ``+nu`` side of the tangent plane, or an even number of times and
``y`` lies on the ``-nu`` side. The mirrored clauses give *exterior*.
For a closed ``M`` bounding ``E`` with outward ``nu`` the interior is E.
"""

from __future__ import annotations

from enum import IntEnum

import math

import numpy as np

from . import rng
from .errors import PointNotOnSurface
from .geometry import count_crossings, point_facet_distances

__all__ = ["SideLabel", "classify", "classify_many", "normal_at", "partition_volume"]


class SideLabel(IntEnum):
    """Label values double as the integrand weight chi_i - chi_e."""

    INTERIOR = 1
    EXTERIOR = -1
    INDETERMINATE = 0


def normal_at(M, z, tol=None):
    """Unit normal of the facet containing ``z``.

    Points on an edge between facets are accepted only if the facet
    normals agree to within 1e-6 radians.
    """
    tol = 10.0 * M.default_tol if tol is None else tol
    z = np.asarray(z, dtype=float)
    d = point_facet_distances(M, z)
    near = np.flatnonzero(d <= tol)
    if near.size == 0:
        raise PointNotOnSurface(f"point {z} is {d.min():.3e} away from the surface")
    n = M.facet_normals[near]
    if near.size > 1 and np.min(n @ n[0]) < np.cos(1e-6):
        raise PointNotOnSurface(f"point {z} lies on a crease of the surface")
    return n[0].copy()


def _check_on_surface(M, z, tol):
    d = point_facet_distances(M, z).min()
    if d > tol:
        raise PointNotOnSurface(f"point {z} is {d:.3e} away from the surface")


FINE_ANGLE = 1e-12


def classify_many(M, z, nu, Y, tol=None, check=True, tol_ang=FINE_ANGLE):
    """Integer labels (+1 interior, -1 exterior, 0 indeterminate) for each row of ``Y``.

    The default tolerances sit at round-off scale: any wider band would
    discard grazing directions that carry real weight near shallow
    surfaces.
    """
    tol = M.fine_tol if tol is None else float(tol)
    z = np.asarray(z, dtype=float)
    nu = np.asarray(nu, dtype=float)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if check:
        _check_on_surface(M, z, 10.0 * M.default_tol)
    Z = np.broadcast_to(z, Y.shape)
    counts, flags = count_crossings(M, Z, Y, tol=tol, skip_start=True, tol_ang=tol_ang)
    h = (Y - z) @ nu
    dist = np.linalg.norm(Y - z, axis=1)
    # +1 when y is on the -nu side with even parity or the +nu side with odd parity
    side = np.where(h < 0, 1, -1)
    lab = np.where(counts % 2 == 0, side, -side)
    bad = flags | (np.abs(h) <= tol_ang * dist) | (dist == 0)
    return np.where(bad, 0, lab).astype(np.int64)


def classify(M, z, nu, y, tol=None):
    """Label of the single point ``y``; see :func:`classify_many`."""
    return SideLabel(int(classify_many(M, z, nu, np.asarray(y, dtype=float)[None], tol)[0]))


def partition_volume(M, z, nu, region, n_samples, seed=0, tol=None):
    """Monte Carlo volume of the interior, exterior and indeterminate sets inside a box.

    Parameters
    ----------
    region : (lo, hi) pair of corner points.

    Returns
    -------
    dict with ``vol_interior``, ``vol_exterior``, ``vol_indeterminate`` and
    the matching ``*_std`` standard errors.
    """
    lo, hi = (np.asarray(c, dtype=float) for c in region)
    vol = float(np.prod(np.maximum(hi - lo, 0.0)))
    keys = ("interior", "exterior", "indeterminate")
    if vol == 0.0 or n_samples <= 0:
        out = {f"vol_{k}": 0.0 for k in keys}
        out.update({f"vol_{k}_std": 0.0 for k in keys})
        return out
    Y = lo + (hi - lo) * rng.uniforms(seed, n_samples, len(lo))
    lab = classify_many(M, z, nu, Y, tol)
    out = {}
    for k, v in zip(keys, (1, -1, 0)):
        p = float(np.mean(lab == v))
        out[f"vol_{k}"] = vol * p
        out[f"vol_{k}_std"] = vol * math.sqrt(p * (1 - p) / n_samples)
    return out
