"""Explicit test geometries: flat disks, cones and two-sheet barriers.

Cones
-----
``make_cone_2d(d)`` is the X-shaped set ``|x2| = d |x1|, |x2| <= d`` with
boundary points ``(+-1, +-d)``; its normals point into the double wedge
``|x2| > d |x1|`` that contains the vertical axis. ``make_cone_nd`` is the
triangulated double cone ``|x3| = |x'|, |x3| <= 1`` with the same
orientation rule.

Barriers
--------
A barrier is the graph of a well profile over the unit disk, lifted by
``t``, together with a flat sheet at height ``t - d(eps)``. The well is
``w(x') = -exp(-1 / (delta^2 - |x'|^2))`` on ``|x'| < delta`` with
``delta = (-log eps)^(-1/2)``, so ``w(0) = -eps``. Optionally a plateau
bump of height ``min(1, phi^beta)`` is added around ``b'`` with
``|b'| = 3/4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DegenerateFacet
from .geometry import Params, build_polylines, build_trimesh, sphere_measure

__all__ = [
    "ConeSpec",
    "BarrierSpec",
    "make_flat_disk",
    "make_cone_2d",
    "make_cone_nd",
    "cone_regular_points",
    "well",
    "well_derivatives",
    "plateau_bump",
    "barrier_profile",
    "barrier_constants",
    "hessian_sup",
    "phi_inverse",
    "make_barrier",
    "barrier_apex",
    "make_dented_disk",
    "make_neck_arcs",
]


def make_flat_disk(radius, height=0.0, n_facets=None, N=2):
    """Flat disk ``{|x'| <= radius, x_N = height}`` with normal ``+e_N``.

    For N=2 this is a segment split into ``n_facets`` pieces (default 1);
    for N=3 a fan around the center with ``n_facets`` triangles (default 64).
    """
    if not radius > 0:
        raise DegenerateFacet("disk radius must be positive")
    if N == 2:
        n = 1 if n_facets is None else int(n_facets)
        x = np.linspace(-radius, radius, n + 1)
        return build_polylines([np.c_[x, np.full_like(x, height)]])
    n = 64 if n_facets is None else int(n_facets)
    a = 2.0 * np.pi * np.arange(n) / n
    V = np.vstack([[0.0, 0.0, height], np.c_[radius * np.cos(a), radius * np.sin(a), np.full(n, height)]])
    T = [(0, 1 + i, 1 + (i + 1) % n) for i in range(n)]
    return build_trimesh(V, T)


# ---------------------------------------------------------------- cones

@dataclass(frozen=True)
class ConeSpec:
    """Cone ``|x_N| = d |x'|`` cut at ``x_N = h_top`` and ``x_N = -h_bot``."""

    N: int = 2
    d: float = 1.0
    h_top: float | None = None
    h_bot: float | None = None

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("cone slope d must be positive")


def make_cone_2d(d, n_per_branch=1):
    """X-shaped planar cone through ``(+-1, d)``, ``0``, ``(+-1, -d)``.

    Two chains meeting at the vertex: the upper V runs ``(-1, d) -> 0 -> (1, d)``
    and the lower V runs ``(1, -d) -> 0 -> (-1, -d)``; with normals equal to
    the direction rotated by +90 degrees both point into ``|x2| > d |x1|``.
    """
    if not d > 0:
        raise ValueError("cone slope d must be positive")
    k = np.linspace(0.0, 1.0, n_per_branch + 1)
    left = np.c_[-1 + k, d * (1 - k)]
    right = np.c_[k, d * k]
    top = np.vstack([left, right[1:]])
    bottom = -top
    # the two chains share the vertex, which the embedding check would reject
    return build_polylines([top, bottom], check_intersections=False)


def make_cone_nd(n_azimuthal=32):
    """Triangulated double cone ``|x3| = |x'|, |x3| <= 1`` with normals into ``|x3| > |x'|``."""
    n = int(n_azimuthal)
    if n < 16:
        raise ValueError("n_azimuthal must be at least 16")
    a = 2.0 * np.pi * np.arange(n) / n
    ring = np.c_[np.cos(a), np.sin(a)]
    V = np.vstack([[0.0, 0.0, 0.0], np.c_[ring, np.ones(n)], np.c_[ring, -np.ones(n)]])
    T = [(0, 1 + i, 1 + (i + 1) % n) for i in range(n)]
    T += [(0, 1 + n + (i + 1) % n, 1 + n + i) for i in range(n)]
    # the nappes meet only at the apex; build_trimesh would try to rewind them jointly
    return build_trimesh(V, T, orient=False)


def cone_regular_points(M, n, apex_exclusion=1e-3, seed=None):
    """Facet indices spread over ``M`` whose barycenters avoid the apex neighborhood."""
    d0 = np.linalg.norm(M.barycenters, axis=1)
    ok = np.flatnonzero(d0 > apex_exclusion)
    pick = np.linspace(0, len(ok) - 1, n).round().astype(int)
    return ok[pick]


# ---------------------------------------------------------------- barrier profile

def _delta(eps):
    return (-math.log(eps)) ** -0.5


def well(x_prime, eps):
    """The well ``-exp(-1/(delta^2 - |x'|^2))`` inside ``|x'| < delta``, 0 outside."""
    rho2 = np.sum(np.atleast_1d(np.asarray(x_prime, dtype=float)) ** 2, axis=0)
    d2 = _delta(eps) ** 2
    inside = rho2 < d2
    gap = np.where(inside, d2 - rho2, 1.0)
    return np.where(inside, -np.exp(-1.0 / gap), 0.0)


def well_derivatives(rho, eps):
    """Radial derivatives ``(w', w'')`` of the well as functions of ``rho = |x'|``."""
    rho = np.asarray(rho, dtype=float)
    d2 = _delta(eps) ** 2
    inside = rho * rho < d2
    g = np.where(inside, 1.0 / np.where(inside, d2 - rho * rho, 1.0), 0.0)
    e = np.where(inside, np.exp(-g), 0.0)
    w1 = 2.0 * rho * g * g * e
    w2 = e * (2.0 * g * g + 8.0 * rho * rho * g ** 3 - 4.0 * rho * rho * g ** 4)
    return w1, w2


def hessian_sup(eps, N):
    """Supremum over x' of the operator norm of the Hessian of the well.

    The eigenvalues are ``w''`` (radial) and, for N=3, ``w'/rho``
    (tangential). Dense sampling locates the maximiser, a bounded scalar
    search refines it.
    """
    delta = _delta(eps)

    def norm(r):
        w1, w2 = well_derivatives(r, eps)
        val = np.abs(w2)
        if N > 2:
            tang = np.where(r > 0, w1 / np.where(r > 0, r, 1.0), np.abs(w2))
            val = np.maximum(val, np.abs(tang))
        return val

    r = np.linspace(0.0, delta, 20001)[:-1]
    v = norm(r)
    k = int(np.argmax(v))
    lo, hi = r[max(k - 1, 0)], r[min(k + 1, len(r) - 1)]
    best = float(v[k])
    if hi > lo:
        res = optimize.minimize_scalar(lambda x: -float(norm(np.array(x))), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-14})
        best = max(best, -float(res.fun))
    return best


def phi_inverse(target, N, eps_range=(1e-300, 1e-2)):
    """Smallest-branch inverse of ``eps -> hessian_sup(eps, N)`` on ``eps_range`` (None if out of range)."""
    lo, hi = (math.log(e) for e in eps_range)
    f = lambda le: hessian_sup(math.exp(le), N) - target
    if f(lo) > 0 or f(hi) < 0:
        return None
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-12))


def _smooth_cutoff(x):
    return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def plateau_bump(rho, height, inner=1.0 / 16, outer=1.0 / 8):
    """Radial C-infinity bump equal to ``height`` for ``rho <= inner`` and 0 for ``rho >= outer``."""
    rho = np.asarray(rho, dtype=float)
    a = _smooth_cutoff(outer - rho)
    b = _smooth_cutoff(rho - inner)
    return height * a / (a + b)


@dataclass(frozen=True)
class BarrierSpec:
    """Parameters of a two-sheet barrier.

    ``t`` defaults to ``eps``; ``beta`` defaults to ``s/2``; ``d_sep``
    overrides the computed sheet separation ``d(eps)``.
    """

    eps: float
    t: float | None = None
    d_sep: float | None = None
    beta: float | None = None
    bump_center_b: tuple = field(default=None)

    def __post_init__(self):
        if not 0.0 < self.eps < math.exp(-4.0):
            raise ValueError("eps must satisfy (-log eps)^(-1/2) < 1/2")
        if self.t is not None and not 0.0 < self.t <= self.eps:
            raise ValueError("t must lie in (0, eps]")

    @property
    def delta(self):
        return _delta(self.eps)

    def resolved_t(self):
        return self.eps if self.t is None else self.t

    def resolved_beta(self, params):
        beta = 0.5 * params.s if self.beta is None else self.beta
        if not 0.0 < beta < params.s:
            raise ValueError("beta must lie in (0, s)")
        return beta

    def resolved_b(self, N):
        if self.bump_center_b is None:
            return np.r_[0.75, np.zeros(N - 2)]
        b = np.asarray(self.bump_center_b, dtype=float)
        if b.shape != (N - 1,) or abs(np.linalg.norm(b) - 0.75) > 1e-12:
            raise ValueError("bump center must have length 3/4 in R^(N-1)")
        return b


def barrier_constants(spec, params):
    """Closed-form constants of the barrier.

    Returns
    -------
    dict with ``delta``, ``phi`` (Hessian sup-norm of the well), ``r_eps``
    = 1/(2(N-1) phi), ``d_eps`` = 2 r_eps, ``c_bound`` =
    (2(N-1))^s omega / (s(1-s)) with omega the measure of the unit sphere
    in R^N, and ``omega`` itself.
    """
    N, s = params.N, params.s
    phi = hessian_sup(spec.eps, N)
    r = 1.0 / (2.0 * (N - 1) * phi)
    omega = sphere_measure(N)
    return {
        "delta": spec.delta,
        "phi": phi,
        "r_eps": r,
        "d_eps": 2.0 * r,
        "c_bound": (2.0 * (N - 1)) ** s * omega / (s * (1.0 - s)),
        "omega": omega,
    }


def barrier_profile(spec, x_prime, params, with_bump=True, phi=None):
    """Height of the graph sheet before lifting by ``t``.

    ``x_prime`` has shape ``(N-1, ...)``. The well occupies ``|x'| < delta``;
    with ``with_bump`` a plateau bump of height ``min(1, phi^beta)`` and
    support radius 1/8 sits at ``b'``.
    """
    N = params.N
    x = np.asarray(x_prime, dtype=float)
    if x.ndim == 0 or (N == 2 and x.shape[0] != 1):
        x = x.reshape((1,) + x.shape)
    out = well(x, spec.eps)
    if with_bump:
        phi = hessian_sup(spec.eps, N) if phi is None else phi
        height = min(1.0, phi ** spec.resolved_beta(params))
        b = spec.resolved_b(N).reshape((N - 1,) + (1,) * (x.ndim - 1))
        out = out + plateau_bump(np.sqrt(np.sum((x - b) ** 2, axis=0)), height)
    return out


def _graph_nodes_1d(delta, h_fine, h_coarse):
    """Nodes on [-1, 1] with fine spacing on the features.

    The origin is the midpoint of a short symmetric segment, so the bottom
    of the well is a facet point with horizontal tangent.
    """
    m = int(math.ceil(delta / h_fine))
    half = h_fine / 8.0 + np.arange(m + 1) * h_fine
    well_nodes = np.concatenate([-half[::-1], half])
    well_nodes = well_nodes[np.abs(well_nodes) < delta + h_fine]
    bump_nodes = np.arange(0.5, 1.0, h_fine / 2.0)
    bump_nodes = bump_nodes[(bump_nodes > 0.6) & (bump_nodes < 0.9)]
    coarse = np.arange(-1.0, 1.0 + 1e-12, h_coarse)
    coarse = coarse[(np.abs(coarse) > delta + h_fine) & ((coarse < 0.6) | (coarse > 0.9))]
    x = np.unique(np.concatenate([[-1.0, 1.0], well_nodes, bump_nodes, coarse]))
    x = x[(x >= -1.0) & (x <= 1.0)]
    # drop coarse nodes that crowd the fine ones
    keep = np.r_[True, np.diff(x) > 0.1 * h_fine]
    return x[keep]


def barrier_apex(M):
    """Point of the graph sheet above ``x' = 0`` (midpoint of the central facet for N=2)."""
    V = M.vertices[M.facets]
    if M.N == 2:
        hit = np.flatnonzero((V[:, 0, 0] < 0) & (V[:, 1, 0] > 0) & (V.mean(axis=1)[:, 1] > M.bbox[0][1]))
        return M.barycenters[hit[0]].copy()
    k = np.flatnonzero(np.all(np.abs(M.vertices[:, :2]) < 1e-15, axis=1))
    return M.vertices[k[0]].copy()


def make_barrier(spec, params, with_bump=False, h_fine=None, h_coarse=0.05, n_rings=None, n_azimuthal=96):
    """Two-sheet barrier: lifted graph sheet over ``|x'| <= 1`` and a flat sheet at ``t - d(eps)``.

    Both sheets carry the normal ``+e_N`` on their flat parts. For N=2 the
    graph sheet is a polyline with a short horizontal segment centred at
    ``x1 = 0``; :func:`barrier_apex` returns its midpoint.
    """
    N = params.N
    t = spec.resolved_t()
    const = barrier_constants(spec, params)
    d = const["d_eps"] if spec.d_sep is None else spec.d_sep
    phi = const["phi"]
    if N == 2:
        h_fine = spec.delta / 200.0 if h_fine is None else h_fine
        x = _graph_nodes_1d(spec.delta, h_fine, h_coarse)
        y = barrier_profile(spec, x[None], params, with_bump=with_bump, phi=phi) + t
        flat = np.c_[np.linspace(-1.0, 1.0, 3), np.full(3, t - d)]
        return build_polylines([np.c_[x, y], flat])
    # N=3: polar grid, graded radially, apex at the center vertex of a fan
    n_rings = 60 if n_rings is None else n_rings
    radii = np.unique(np.concatenate([np.linspace(0.0, spec.delta * 1.02, n_rings),
                                      np.linspace(spec.delta * 1.02, 1.0, 20)]))[1:]
    a = 2.0 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    pts = [np.zeros(2)]
    for r in radii:
        pts.extend(np.c_[r * np.cos(a), r * np.sin(a)])
    P = np.array(pts)
    z = barrier_profile(spec, P.T, params, with_bump=with_bump, phi=phi) + t
    V = np.c_[P, z]
    T = [(0, 1 + i, 1 + (i + 1) % n_azimuthal) for i in range(n_azimuthal)]
    for k in range(len(radii) - 1):
        o0, o1 = 1 + k * n_azimuthal, 1 + (k + 1) * n_azimuthal
        for i in range(n_azimuthal):
            j = (i + 1) % n_azimuthal
            T += [(o0 + i, o1 + i, o1 + j), (o0 + i, o1 + j, o0 + j)]
    nv = len(V)
    flat_ring = np.c_[np.cos(a), np.sin(a), np.full(n_azimuthal, t - d)]
    V = np.vstack([V, [[0.0, 0.0, t - d]], flat_ring])
    T += [(nv, nv + 1 + i, nv + 1 + (i + 1) % n_azimuthal) for i in range(n_azimuthal)]
    return build_trimesh(V, T)


# ---------------------------------------------------------------- probe targets

def make_dented_disk(depth=0.2, inner=0.15, outer=0.4, n=200, N=2, n_azimuthal=64):
    """Flat unit disk pushed down by a plateau bump of the given ``depth``.

    The bottom of the dent is exactly flat for ``|x'| <= inner``, so the
    lowest points form whole facets with horizontal tangent.
    """
    if N == 2:
        x = np.unique(np.concatenate([np.linspace(-1.0, 1.0, n + 1), [-inner, inner]]))
        x = x[np.r_[True, np.diff(x) > 1e-9]]
        y = -plateau_bump(np.abs(x), depth, inner, outer)
        return build_polylines([np.c_[x, y]])
    r = np.unique(np.concatenate([np.linspace(0.0, 1.0, n // 4 + 1), [inner]]))[1:]
    a = 2.0 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    R, A = np.meshgrid(r, a, indexing="ij")
    ring = np.c_[(R * np.cos(A)).ravel(), (R * np.sin(A)).ravel()]
    V = np.vstack([[0.0, 0.0, -depth], np.c_[ring, -plateau_bump(np.hypot(ring[:, 0], ring[:, 1]), depth, inner, outer)]])
    m = n_azimuthal
    T = [(0, 1 + j, 1 + (j + 1) % m) for j in range(m)]
    for i in range(len(r) - 1):
        for j in range(m):
            a0, a1 = 1 + i * m + j, 1 + i * m + (j + 1) % m
            b0, b1 = a0 + m, a1 + m
            T += [(a0, b0, b1), (a0, b1, a1)]
    return build_trimesh(V, T)


def make_neck_arcs(d, bulge=0.5, n=200):
    """Two arcs joining ``(+-1, 0)`` to ``(+-1, -d)``, bowed inward by ``bulge``.

    ``x = +-(1 - bulge sin(pi |y| / d))``: the shape of the connected
    regime where each component meets both boundary rings.
    """
    y = -np.linspace(0.0, d, n + 1)
    x = 1.0 - bulge * np.sin(np.pi * np.abs(y) / d)
    return build_polylines([np.c_[-x, y], np.c_[x, y][::-1]])
