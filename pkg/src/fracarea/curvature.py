"""Fractional mean curvature of a hypersurface with boundary.

At a point ``z`` of ``M`` with unit normal ``nu``::

    H(z) = cN * PV integral of (chi_i(y) - chi_e(y)) |y - z|^-(N+s) dy

where ``chi_i``/``chi_e`` are the interior/exterior labels of
:mod:`fracarea.sides`. With this sign a convex closed surface with
outward normal has H < 0.

Three independent evaluators are provided:

* :func:`fmc_estimate`, Monte Carlo with a heavy-tailed radial law and
  antithetic reflection across the tangent plane (any N);
* :func:`fmc_polar_2d`, deterministic ray-by-ray quadrature for polylines;
* :func:`fmc_graph`, the local contribution of a graph written with the
  odd function ``F``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy import integrate, special

from . import rng
from .errors import BoundaryPoint, NonConvergent, NotSmooth, PointNotOnSurface
from .geometry import Params, distance_to_boundary, point_facet_distances, sphere_measure, tangent_frame
from .sides import classify_many, normal_at

__all__ = [
    "Estimate",
    "QuadratureSpec",
    "fmc_estimate",
    "fmc_at_facets",
    "fmc_polar_2d",
    "F_eval",
    "F_fast",
    "fmc_graph",
    "fmc_consistency",
]

MAX_RESAMPLE = 100
MAX_INDETERMINATE_RATE = 1e-2


@dataclass(frozen=True)
class Estimate:
    """A numerical value with its statistical and deterministic error budget.

    The reported interval is ``value +- (3 * std_error + trunc_bound)``.
    """

    value: float
    std_error: float = 0.0
    trunc_bound: float = 0.0
    n_eval: int = 0
    seed: int | None = None

    @property
    def halfwidth(self):
        return 3.0 * self.std_error + self.trunc_bound

    @property
    def interval(self):
        return self.value - self.halfwidth, self.value + self.halfwidth

    def contains(self, x):
        return abs(self.value - x) <= self.halfwidth

    def overlaps(self, other):
        return abs(self.value - other.value) <= self.halfwidth + other.halfwidth

    def sign(self):
        """+1 or -1 when the interval excludes 0, otherwise 0."""
        if abs(self.value) <= self.halfwidth:
            return 0
        return 1 if self.value > 0 else -1

    def to_dict(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in asdict(self).items()}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


@dataclass(frozen=True)
class QuadratureSpec:
    """Sampling controls for :func:`fmc_estimate`.

    ``r_near=None`` picks the largest ball around ``z`` in which ``M`` is
    a flat piece of the tangent plane; that ball contributes exactly zero.
    ``R_far=inf`` samples the radial tail exactly, so no far-field
    truncation error arises. ``n_samples`` counts antithetic pairs.
    """

    r_near: float | None = None
    R_far: float = math.inf
    n_samples: int = 200_000
    seed: int = 0
    alpha_reg: float = 1.0

    def __post_init__(self):
        if self.r_near is not None and not 0.0 < self.r_near < self.R_far:
            raise ValueError("need 0 < r_near < R_far")
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        if not 0.0 < self.alpha_reg <= 1.0:
            raise ValueError("alpha_reg must lie in (0, 1]")


# ---------------------------------------------------------------- helpers

def _flat_radius(M, z, nu, tol):
    """Distance from ``z`` to the nearest facet not lying in the tangent plane at ``z``."""
    d = point_facet_distances(M, z)
    n = M.facet_normals
    off = np.abs((M.vertices[M.facets[:, 0]] - z) @ nu)
    coplanar = (np.abs(n @ nu) > 1.0 - 1e-12) & (off < tol)
    return float(d[~coplanar].min()) if np.any(~coplanar) else math.inf


def _holder_constant(M, z, nu, frame, radius, alpha):
    """Bound K with |height over the tangent plane| <= K |x'|^(1+alpha) near z.

    Combines a quadratic least-squares fit of vertex heights (curvature
    scale) with the largest observed ratio at the vertices themselves.
    """
    rel = M.vertices - z
    h = rel @ nu
    x = rel @ frame[:, :-1]
    rho = np.linalg.norm(x, axis=1)
    sel = (rho > 0) & (rho <= max(2.0 * radius, 1e-300))
    if not np.any(sel):
        return 0.0
    K = float(np.max(np.abs(h[sel]) / rho[sel] ** (1.0 + alpha)))
    if np.count_nonzero(sel) >= 3 * x.shape[1]:
        cols = [x[sel, i] * x[sel, j] for i in range(x.shape[1]) for j in range(i, x.shape[1])]
        A = np.stack(cols + [x[sel, i] for i in range(x.shape[1])], axis=1)
        coef, *_ = np.linalg.lstsq(A, h[sel], rcond=None)
        quad = np.abs(coef[: len(cols)]).sum()
        K = max(K, quad * radius ** (1.0 - alpha))
    return K


def _canonical_frame(nu):
    """Frame whose tangent columns depend only on the line spanned by ``nu``.

    Using the same tangent columns for ``nu`` and ``-nu`` makes the two
    antithetic sample sets coincide, so flipping the orientation flips
    the estimate exactly.
    """
    k = int(np.flatnonzero(np.abs(nu) > 1e-12)[0])
    sign = 1.0 if nu[k] > 0 else -1.0
    Q = tangent_frame(sign * nu)
    Q[:, -1] = nu
    return Q


def _directions(u, frame):
    """Unit vectors from uniforms, expressed in ``frame`` (last column = normal)."""
    return rng.unit_vectors(u) @ frame.T


# ---------------------------------------------------------------- Monte Carlo

def fmc_estimate(M, z, nu, params: Params, spec: QuadratureSpec = QuadratureSpec(), *,
                 frame=None, window=None, tol=None):
    """Monte Carlo estimate of H at ``z`` for the orientation ``nu``.

    Parameters
    ----------
    M : Hypersurface
    z, nu : point on ``M`` and unit normal there.
    params : Params
    spec : QuadratureSpec
    frame : optional (N, N) orthonormal matrix whose last column is ``nu``.
        Sample directions are drawn in this frame, so transporting ``M``,
        ``z``, ``nu`` and ``frame`` by one isometry transports every sample.
    window : optional ``(center, radius)``; restricts the integral to the
        vertical cylinder ``|y' - center'| < radius`` (last coordinate free).
        Used to compare with :func:`fmc_graph`.

    Returns
    -------
    Estimate
    """
    N, s = params.N, params.s
    z = np.asarray(z, dtype=float)
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    tol = M.fine_tol if tol is None else tol
    if spec.alpha_reg <= s:
        raise ValueError("alpha_reg must exceed s")
    frame = _canonical_frame(nu) if frame is None else np.asarray(frame, dtype=float)

    d_bdry = distance_to_boundary(M, z)
    if d_bdry <= 1e-6 * M.diam:
        raise BoundaryPoint(f"z is {d_bdry:.3e} from the boundary")
    d_flat = _flat_radius(M, z, nu, M.default_tol)
    reach = float(np.linalg.norm(M.vertices - z, axis=1).max())
    if spec.r_near is None:
        r_near = min(d_flat, d_bdry * (1.0 - 1e-9), reach)
    else:
        r_near = spec.r_near
        if d_bdry < r_near:
            raise BoundaryPoint(f"z is {d_bdry:.3e} from the boundary, closer than r_near={r_near:.3e}")
    if not r_near > 0:
        raise PointNotOnSurface("z lies on a crease or vertex of the surface")
    R_far = spec.R_far

    # deterministic error budget: far tail beyond R_far, curved part inside r_near
    trunc = 0.0
    if math.isfinite(R_far):
        trunc += params.cN * sphere_measure(N) * R_far ** (-s) / s
    if r_near > d_flat:
        a = spec.alpha_reg
        K = _holder_constant(M, z, nu, frame, r_near, a)
        trunc += params.cN * 2.0 * K * sphere_measure(N - 1) * r_near ** (a - s) / (a - s)

    if window is not None:
        w_center = np.asarray(window[0], dtype=float)[:-1]
        w_radius = float(window[1])
    n = int(spec.n_samples)
    prop = _Proposal(N, s, r_near, R_far, max(reach, 2.0 * r_near))
    # beyond the reach of M labels depend on the direction only
    r_cap = 2.0 * reach + 2.0 * r_near

    def draw(count, stream):
        u = rng.open_uniforms(spec.seed, count, prop.dim, stream)
        r, tau, e, weight = prop.sample(u)
        w_up = np.cos(e)[:, None] * (tau @ frame[:, :-1].T) + np.sin(e)[:, None] * nu
        w_dn = w_up - 2.0 * np.sin(e)[:, None] * nu
        if window is not None:
            # the window test needs the true sample position, not the clipped one
            in_up = np.linalg.norm(r[:, None] * w_up[:, :-1] + z[:-1] - w_center, axis=1) < w_radius
            in_dn = np.linalg.norm(r[:, None] * w_dn[:, :-1] + z[:-1] - w_center, axis=1) < w_radius
            weight = np.stack([weight * in_up, weight * in_dn], axis=1)
        else:
            weight = np.stack([weight, weight], axis=1)
        rc = np.minimum(r, r_cap)[:, None]
        return z + rc * w_up, z + rc * w_dn, weight

    def labels(Y, Yr):
        g = classify_many(M, z, nu, np.concatenate([Y, Yr]), tol, check=False)
        return g[: len(Y)], g[len(Y):]

    Y, Yr, wt = draw(n, 0)
    g, gr = labels(Y, Yr)
    bad = np.flatnonzero((g == 0) | (gr == 0))
    if bad.size > MAX_INDETERMINATE_RATE * n:
        raise NonConvergent(f"indeterminate rate {bad.size / n:.3e} exceeds {MAX_INDETERMINATE_RATE}")
    attempt = 0
    while bad.size:
        attempt += 1
        if attempt > MAX_RESAMPLE:
            raise NonConvergent("resample budget exhausted")
        Yb, Ybr, wb = draw(bad.size, attempt)
        gb, gbr = labels(Yb, Ybr)
        Y[bad], Yr[bad], wt[bad], g[bad], gr[bad] = Yb, Ybr, wb, gb, gbr
        bad = bad[(gb == 0) | (gbr == 0)]

    f = g * wt[:, 0] + gr * wt[:, 1]
    return Estimate(
        value=float(params.cN * f.mean()),
        std_error=float(params.cN * f.std(ddof=1) / math.sqrt(n)),
        trunc_bound=float(trunc),
        n_eval=2 * n,
        seed=int(spec.seed),
    )


class _Proposal:
    """Defensive-mixture proposal for (radius, tangent direction, elevation).

    A direction is ``cos(e) tau + sin(e) nu`` with ``tau`` a unit tangent
    vector and elevation ``e`` in (0, pi/2); its mirror image uses ``-e``.
    Radius: half the kernel law ``r^(-1-s)`` on (r_near, R_far), half the
    log-uniform law on (r_near, L), which spreads samples evenly over the
    scales of the surface. Elevation: half the sphere's own
    law, half a law ``e^(-1/2)`` that favours grazing directions, where a
    curved surface separates from its tangent plane. Weights are bounded
    by 2 relative to plain kernel sampling.
    """

    def __init__(self, N, s, r_near, R_far, L):
        self.N, self.s = N, s
        self.a, self.b = r_near, R_far
        self.L = min(L, R_far)
        self.dim = 5
        # normalisations of the two radial components
        self.z1 = (r_near ** (-s) - (0.0 if math.isinf(R_far) else R_far ** (-s))) / s
        self.z2 = math.log(self.L / r_near)
        self.e_max = 0.5 * math.pi

    def _radius(self, sel, u):
        s, a = self.s, self.a
        if math.isinf(self.b):
            r1 = a * u ** (-1.0 / s)
        else:
            r1 = (a ** (-s) - u * (a ** (-s) - self.b ** (-s))) ** (-1.0 / s)
        r2 = a * np.exp(u * self.z2)
        return np.where(sel < 0.5, r1, r2)

    def _radial_density(self, r):
        s = self.s
        q1 = r ** (-1 - s) / self.z1
        q2 = np.where(r <= self.L, 1.0 / (r * self.z2), 0.0)
        return 0.5 * q1 + 0.5 * q2

    def _elevation(self, sel, u):
        if self.N == 2:
            e1 = self.e_max * u
        else:
            e1 = np.arcsin(u)
        e2 = self.e_max * u * u
        return np.where(sel < 0.5, e1, e2)

    def _elevation_density(self, e):
        base = 1.0 / self.e_max if self.N == 2 else np.cos(e)
        grazing = 0.5 / np.sqrt(self.e_max * np.maximum(e, 1e-300))
        return 0.5 * base + 0.5 * grazing

    def sample(self, u):
        """Map uniforms to ``(r, tau, e, weight)``; ``weight`` multiplies ``g(up) + g(down)``."""
        r = self._radius(u[:, 0], u[:, 1])
        e = self._elevation(u[:, 2], u[:, 3])
        if self.N == 2:
            tau = np.where(u[:, 4] < 0.5, -1.0, 1.0)[:, None]
            p_tau, jac = 0.5, 1.0
        else:
            psi = 2.0 * math.pi * u[:, 4]
            tau = np.stack([np.cos(psi), np.sin(psi)], axis=1)
            p_tau, jac = 1.0 / (2.0 * math.pi), np.cos(e)
        weight = r ** (-1 - self.s) * jac / (p_tau * self._elevation_density(e) * self._radial_density(r))
        return r, tau, e, weight


def fmc_at_facets(M, facets, params, spec=QuadratureSpec(), orientation=1):
    """Estimates at the barycenters of the given facets (normal = facet normal * orientation)."""
    out = []
    for k, f in enumerate(np.atleast_1d(facets)):
        sp = replace(spec, seed=spec.seed + k)
        out.append(fmc_estimate(M, M.barycenters[f], orientation * M.facet_normals[f], params, sp))
    return out


# ---------------------------------------------------------------- deterministic 2D oracle

def _ray_hits(P, E, z, d, tol):
    """Sorted distances along the ray z + r d (r > tol) at which it crosses the segments."""
    den = d[0] * E[:, 1] - d[1] * E[:, 0]
    w = P - z
    ok = np.abs(den) > 1e-15
    den = np.where(ok, den, 1.0)
    r = (w[:, 0] * E[:, 1] - w[:, 1] * E[:, 0]) / den
    u = (w[:, 0] * d[1] - w[:, 1] * d[0]) / den
    sel = ok & (r > tol) & (u >= 0.0) & (u <= 1.0)
    return np.sort(r[sel])


def _radial_integral(hits_a, hits_b, s):
    """Exact integral over r in (0, inf) of ((-1)^kb(r) - (-1)^ka(r)) r^(-1-s) dr.

    ``ka(r)``/``kb(r)`` count the crossings before r on the two rays.
    """
    ev = np.concatenate([hits_a, hits_b])
    if ev.size == 0:
        return 0.0
    which = np.concatenate([np.zeros(len(hits_a), int), np.ones(len(hits_b), int)])
    order = np.argsort(ev, kind="stable")
    ev, which = ev[order], which[order]
    pa = pb = 1
    total = 0.0
    for k in range(len(ev)):
        if which[k] == 0:
            pa = -pa
        else:
            pb = -pb
        hi = ev[k + 1] ** (-s) if k + 1 < len(ev) else 0.0
        total += (pb - pa) * (ev[k] ** (-s) - hi) / s
    return total


def fmc_polar_2d(M, z, nu, params, epsrel=1e-9, tol=None):
    """Deterministic H for a polyline by exact radial integration along rays.

    Each direction on the ``+nu`` side is paired with its mirror image
    across the tangent line; the radial integral is exact and the angular
    integral uses adaptive quadrature split at the directions of all
    vertices. Returns an :class:`Estimate` whose ``trunc_bound`` is the
    quadrature error estimate.
    """
    if params.N != 2:
        raise ValueError("fmc_polar_2d is for planar polylines")
    s = params.s
    z = np.asarray(z, dtype=float)
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    tol = M.default_tol if tol is None else tol
    if distance_to_boundary(M, z) <= 1e-6 * M.diam:
        raise BoundaryPoint("z lies on the boundary")
    t = np.array([nu[1], -nu[0]])
    P = M.vertices[M.facets[:, 0]]
    E = M.vertices[M.facets[:, 1]] - P
    nevals = 0

    def g(phi):
        nonlocal nevals
        nevals += 1
        c, sn = math.cos(phi), math.sin(phi)
        up = _ray_hits(P, E, z, c * t + sn * nu, tol)
        dn = _ray_hits(P, E, z, c * t - sn * nu, tol)
        return _radial_integral(up, dn, s)

    rel = M.vertices - z
    ang = np.arctan2(rel @ nu, rel @ t)
    brk = np.unique(np.concatenate([[0.0, math.pi], np.abs(ang)]))
    brk = brk[(brk >= 0.0) & (brk <= math.pi)]
    total = err = 0.0
    for a, b in zip(brk[:-1], brk[1:]):
        if b - a < 1e-14:
            continue
        v, e = integrate.quad(g, a, b, epsabs=0.0, epsrel=epsrel, limit=200)
        total += v
        err += e
    return Estimate(value=params.cN * total, std_error=0.0, trunc_bound=params.cN * err, n_eval=nevals)


# ---------------------------------------------------------------- graph formula

def F_eval(t, params):
    """F(t) = integral from 0 to t of (1 + sigma^2)^(-(N+s)/2) d sigma (adaptive Gauss-Kronrod)."""
    p = 0.5 * (params.N + params.s)
    if t == 0:
        return 0.0
    v, _ = integrate.quad(lambda x: (1.0 + x * x) ** (-p), 0.0, abs(t), epsabs=0.0, epsrel=1e-13, limit=200)
    return math.copysign(v, t)


def F_fast(t, N, s):
    """Vectorised F through the hypergeometric closed form t 2F1(1/2, (N+s)/2; 3/2; -t^2)."""
    t = np.asarray(t, dtype=float)
    return t * special.hyp2f1(0.5, 0.5 * (N + s), 1.5, -t * t)


def _check_hessian(u, q, radius, N, bound):
    h = 1e-4 * radius
    pts = np.linspace(-radius, radius, 41)
    if N == 2:
        x = q[0] + pts
        d2 = (u(np.array([x + h])) - 2.0 * u(np.array([x])) + u(np.array([x - h]))) / h ** 2
        worst = float(np.max(np.abs(d2)))
    else:
        X, Yg = np.meshgrid(q[0] + pts, q[1] + pts)
        worst = 0.0
        for ex, ey in ((1, 0), (0, 1), (1, 1), (1, -1)):
            nrm = math.hypot(ex, ey)
            dx, dy = h * ex / nrm, h * ey / nrm
            d2 = (u(np.stack([X + dx, Yg + dy])) - 2.0 * u(np.stack([X, Yg])) + u(np.stack([X - dx, Yg - dy]))) / h ** 2
            worst = max(worst, float(np.max(np.abs(d2))))
    if worst > bound:
        raise NotSmooth(f"finite-difference Hessian {worst:.3e} exceeds the bound {bound:.3e}")


def fmc_graph(u, q_prime, params, spec: QuadratureSpec = QuadratureSpec(R_far=1.0), *, hessian_bound=None,
              n_angles=64, breakpoints=None):
    """Local curvature contribution of the graph of ``u`` over the disk of radius ``spec.R_far``.

    Computes ``cN * 2 * integral over |x'| < R of F((u(q'+x') - u(q'))/|x'|) |x'|^-(N-1+s) dx'``,
    the contribution of the vertical cylinder over the disk when the
    region below the graph is the interior (normal ``+e_N``). Pairing
    ``x'`` with ``-x'`` makes the integrand O(|x'|^-s) at the origin.

    Parameters
    ----------
    u : callable
        Takes an array of shape ``(N-1, ...)`` and returns heights of shape ``(...)``.
    q_prime : base point in R^(N-1).
    breakpoints : optional abscissae (N=2) where ``u`` has kinks, e.g. the
        vertices of a polyline; the radial integral is split there.
    hessian_bound : optional; raise :class:`NotSmooth` if a finite
        difference Hessian of ``u`` exceeds it.
    """
    N, s = params.N, params.s
    R = spec.R_far
    if not math.isfinite(R):
        raise ValueError("fmc_graph needs a finite disk radius (spec.R_far)")
    q = np.atleast_1d(np.asarray(q_prime, dtype=float))
    if hessian_bound is not None:
        _check_hessian(u, q, R, N, hessian_bound)
    u0 = float(np.ravel(u(q.reshape(N - 1, 1)))[0])

    def radial(e, cuts=()):
        """Integral over rho in (0, R) of [F(a+) + F(a-)] rho^(-1-s) along the line q' + rho e."""
        def h(rho):
            rho = np.atleast_1d(rho)
            pp = q[:, None] + rho[None, :] * e[:, None]
            pm = q[:, None] - rho[None, :] * e[:, None]
            a_plus = (np.ravel(u(pp)) - u0) / rho
            a_minus = (np.ravel(u(pm)) - u0) / rho
            return (F_fast(a_plus, N, s) + F_fast(a_minus, N, s)) / rho

        # the paired integrand h tends to a finite limit at rho = 0, where the
        # difference quotients lose all digits; below rho0 it is taken constant
        rho0 = min(1e-4 * R, 0.5 * min([c for c in cuts if c > 0.0], default=R))
        h0 = float(h(rho0)[0])
        total = h0 * rho0 ** (1.0 - s) / (1.0 - s)
        err = abs(float(h(2.0 * rho0)[0]) - h0) * rho0 ** (1.0 - s) / (1.0 - s)
        knots = np.unique(np.concatenate([[rho0, R], [c for c in cuts if rho0 < c < R]]))
        with warnings.catch_warnings():
            # quad's own error estimate is reported in trunc_bound
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            for a, b in zip(knots[:-1], knots[1:]):
                v, e_ = integrate.quad(lambda r: float(h(r)[0]) * r ** (-s), a, b,
                                       epsabs=1e-14, epsrel=1e-10, limit=200)
                total += v
                err += e_
        return total, err

    if N == 2:
        cuts = () if breakpoints is None else np.abs(np.asarray(breakpoints, dtype=float) - q[0])
        val, bound = radial(np.array([1.0]), cuts)
    else:
        def sweep(m):
            th = (np.arange(m) + 0.5) * math.pi / m
            res = [radial(np.array([math.cos(a), math.sin(a)])) for a in th]
            return math.pi / m * sum(r[0] for r in res), math.pi / m * sum(r[1] for r in res)

        val, err = sweep(n_angles)
        coarse, _ = sweep(n_angles // 2)
        bound = err + abs(val - coarse)
    return Estimate(value=2.0 * params.cN * val, std_error=0.0, trunc_bound=2.0 * params.cN * bound,
                    n_eval=n_angles if N == 3 else 1)


def fmc_consistency(M, z, params, *, u=None, radius=None, nu=None, spec=QuadratureSpec(), graph_spec=None):
    """Compare the Monte Carlo estimate restricted to a cylinder with :func:`fmc_graph`.

    ``M`` must be a graph over the disk of radius ``radius`` about ``z'``
    (interior below). By default the graph side integrates the piecewise
    linear interpolant of ``M`` itself, so both evaluators see the same
    surface; pass a smooth ``u`` to measure the discretisation gap instead.
    Passing a normal ``nu`` that points downward evaluates the Monte Carlo
    side with the opposite orientation, which is how an orientation
    mismatch shows up.

    Returns
    -------
    dict with ``mc``, ``graph`` (Estimate) and ``compatible`` (intervals overlap).
    """
    z = np.asarray(z, dtype=float)
    if nu is None:
        nu = normal_at(M, z)
        if nu[-1] < 0:
            nu = -nu
    if radius is None:
        lo, hi = M.bbox
        radius = 0.999 * float(np.min(np.minimum(z[:-1] - lo[:-1], hi[:-1] - z[:-1])))
    breakpoints = None
    if u is None:
        u = _interpolant(M)
        if M.N == 2:
            breakpoints = M.vertices[:, 0]
    mc = fmc_estimate(M, z, nu, params, spec, window=(z, radius))
    gspec = graph_spec or QuadratureSpec(R_far=radius)
    gr = fmc_graph(u, z[:-1], params, gspec, breakpoints=breakpoints)
    return {"mc": mc, "graph": gr, "compatible": bool(mc.overlaps(gr))}


def _interpolant(M):
    V = M.vertices
    if M.N == 2:
        order = np.argsort(V[:, 0])
        xs, ys = V[order, 0], V[order, 1]
        return lambda x: np.interp(np.asarray(x)[0], xs, ys)
    from scipy.interpolate import LinearNDInterpolator

    f = LinearNDInterpolator(V[:, :2], V[:, 2])
    return lambda x: f(np.moveaxis(np.asarray(x), 0, -1))


def estimate_at(M, z, params, spec=QuadratureSpec(), orientation=1):
    """Convenience wrapper: normal from the containing facet, times ``orientation``."""
    return fmc_estimate(M, z, orientation * normal_at(M, z), params, spec)
