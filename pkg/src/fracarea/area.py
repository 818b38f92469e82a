"""Fractional area ``Per_s(M; Omega)`` and the classical fractional perimeter.

``Per_s`` counts ordered pairs ``(x, y)`` whose segment crosses ``M`` an
odd number of times, weighted by ``max(chi_Omega(x), chi_Omega(y))
|x - y|^-(N+s)``. For a closed surface ``M = dE`` and ``cN = 1`` every
unordered pair appears twice, so ``Per_s = 2 P_s(E; Omega)``.

The Monte Carlo estimator uses the line (Crofton) form of the pair
measure. Each admissible segment is written as ``x = p - u theta``,
``y = p + v theta`` with ``p`` one of its ``k`` crossing points on ``M``::

    dx dy = |theta . nu(p)| (u + v)^(N-1) dH(p) dtheta du dv

and the factor ``1/k`` removes the multiplicity. The resulting integrand
``(u + v)^(-1-s) |theta . nu| / k`` has no cancellation, so both the
curvature-free region and the boundary of ``M`` are sampled stably.

The classical oracle uses a different route. It picks random lines
through ``E`` and integrates ``|a - b|^(-1-s)`` exactly over the
inside/outside intervals of ``E`` and ``Omega`` along each line.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import rng
from .curvature import MAX_INDETERMINATE_RATE, MAX_RESAMPLE, Estimate, QuadratureSpec
from .errors import ConfigError, NonConvergent, NotContained
from .geometry import Params, count_crossings, sphere_measure

__all__ = [
    "Domain",
    "Region",
    "per_s_estimate",
    "classical_ps_oracle",
    "classical_ps_quadrature",
    "area_constant",
    "ScanResult",
    "area_limit_scan",
    "richardson_weights",
]


def _ball_volume(n, r=1.0):
    """Lebesgue measure of the radius-``r`` ball in R^n (n >= 0)."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r ** n


# ------------------------------------------------------------------ regions
@dataclass(frozen=True)
class Region:
    """A bounded set with an inside test and exact line intersections.

    Use the constructors :meth:`ball`, :meth:`box`, :meth:`polygon` and
    :meth:`empty`.
    """

    kind: str
    data: tuple = field(default=())
    N: int = 2

    def __post_init__(self):
        # hook for subclasses that restrict the allowed kinds
        pass

    # -- constructors
    @classmethod
    def ball(cls, center, radius):
        c = tuple(float(x) for x in center)
        if not radius > 0:
            raise ConfigError("radius must be positive")
        return cls("ball", (c, float(radius)), len(c))

    @classmethod
    def box(cls, lo, hi):
        lo = tuple(float(x) for x in lo)
        hi = tuple(float(x) for x in hi)
        if len(lo) != len(hi) or not all(a < b for a, b in zip(lo, hi)):
            raise ConfigError("box needs lo < hi componentwise")
        return cls("box", (lo, hi), len(lo))

    @classmethod
    def polygon(cls, points):
        P = tuple(tuple(float(x) for x in p) for p in points)
        if len(P) < 3 or any(len(p) != 2 for p in P):
            raise ConfigError("polygon needs at least 3 planar vertices")
        return cls("polygon", P, 2)

    @classmethod
    def empty(cls, N=2):
        return cls("empty", (), N)

    # -- queries
    @property
    def bounding_ball(self):
        """(center, radius) of a ball containing the region."""
        if self.kind == "ball":
            return np.array(self.data[0]), self.data[1]
        if self.kind == "box":
            lo, hi = np.array(self.data[0]), np.array(self.data[1])
            return (lo + hi) / 2, float(np.linalg.norm(hi - lo)) / 2
        if self.kind == "polygon":
            P = np.array(self.data)
            c = P.mean(axis=0)
            return c, float(np.linalg.norm(P - c, axis=1).max())
        return np.zeros(self.N), 0.0

    def contains(self, X):
        """Boolean mask of points strictly inside (open set)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "ball":
            c, r = self.data
            return np.linalg.norm(X - np.array(c), axis=1) < r
        if self.kind == "box":
            lo, hi = self.data
            return np.all((X > np.array(lo)) & (X < np.array(hi)), axis=1)
        if self.kind == "polygon":
            P = np.array(self.data)
            Q = np.roll(P, -1, axis=0)
            x, y = X[:, :1], X[:, 1:2]
            cond = (P[:, 1] > y) != (Q[:, 1] > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xc = P[:, 0] + (y - P[:, 1]) * (Q[:, 0] - P[:, 0]) / (Q[:, 1] - P[:, 1])
            return (np.sum(cond & (x < xc), axis=1) % 2) == 1
        return np.zeros(len(X), dtype=bool)

    def line_crossings(self, O, theta):
        """Parameters ``t`` where ``O + t theta`` crosses the boundary.

        Returns an ``(n, K)`` array, sorted per row; missing crossings are
        padded with copies of the last one (zero-length pieces), or with 0
        when the line misses the region.
        """
        n = len(O)
        if self.kind in ("ball", "box"):
            t0, t1, hit = self._convex_chord(O, theta)
            out = np.where(hit[:, None], np.stack([t0, t1], axis=1), 0.0)
            return out
        if self.kind == "polygon":
            P = np.array(self.data)
            E = np.roll(P, -1, axis=0) - P
            # solve O + t theta = P + u E
            den = theta[:, :1] * E[:, 1] - theta[:, 1:] * E[:, 0]
            W = P[None, :, :] - O[:, None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (W[..., 0] * E[:, 1] - W[..., 1] * E[:, 0]) / den
                u = (W[..., 0] * theta[:, 1:] - W[..., 1] * theta[:, :1]) / den
            ok = (den != 0) & (u >= 0) & (u < 1)
            t = np.where(ok, t, np.inf)
            t.sort(axis=1)
            k = ok.sum(axis=1)
            last = np.where(k > 0, t[np.arange(n), np.maximum(k - 1, 0)], 0.0)
            return np.where(np.isfinite(t), t, last[:, None])
        return np.zeros((n, 2))

    def _convex_chord(self, O, theta):
        if self.kind == "ball":
            c, r = self.data
            w = O - np.array(c)
            b = np.einsum("ij,ij->i", w, theta)
            disc = b * b - (np.einsum("ij,ij->i", w, w) - r * r)
            hit = disc > 0
            sq = np.sqrt(np.where(hit, disc, 0.0))
            return -b - sq, -b + sq, hit
        lo, hi = np.array(self.data[0]), np.array(self.data[1])
        with np.errstate(divide="ignore", invalid="ignore"):
            a = (lo - O) / theta
            b = (hi - O) / theta
        inside = (O > lo) & (O < hi)
        par = theta == 0
        a = np.where(par, np.where(inside, -np.inf, np.inf), a)
        b = np.where(par, np.where(inside, np.inf, -np.inf), b)
        t0 = np.minimum(a, b).max(axis=1)
        t1 = np.maximum(a, b).min(axis=1)
        hit = t1 > t0
        return t0, t1, hit


class Domain(Region):
    """The bounded convex container ``Omega`` (axis-aligned box or ball)."""

    def __post_init__(self):
        if self.kind not in ("ball", "box"):
            raise ConfigError("Omega must be a ball or an axis-aligned box")

    def far_distance(self, X):
        """Largest distance from each point of ``X`` to a point of the closure."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "ball":
            c, r = self.data
            return np.linalg.norm(X - np.array(c), axis=1) + r
        lo, hi = np.array(self.data[0]), np.array(self.data[1])
        far = np.maximum(np.abs(X - lo), np.abs(X - hi))
        return np.linalg.norm(far, axis=1)

    def check_contains(self, M):
        if self.N != M.N:
            raise ConfigError("dimension mismatch between M and Omega")
        if not np.all(self.contains(M.vertices)):
            raise NotContained("M is not contained in the interior of Omega")

    def translated(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "ball":
            return Domain.ball(np.array(self.data[0]) + t, self.data[1])
        return Domain.box(np.array(self.data[0]) + t, np.array(self.data[1]) + t)


# ------------------------------------------------------------- Per_s by MC
def area_constant(params: Params):
    """``kappa`` with ``(1 - s) Per_s(M; Omega) -> kappa H^{N-1}(M)`` as s -> 1.

    Short segments through a point of ``M`` dominate the limit; they
    contribute ``cN`` times the integral of ``|theta . nu|`` over the unit
    sphere, which is twice the volume of the unit ball in R^(N-1).
    """
    return params.cN * 2.0 * _ball_volume(params.N - 1)


def _sample_on_surface(M, u):
    """Area-uniform points on ``M`` from ``(n, N)`` uniforms; returns (points, facet ids)."""
    w = np.asarray(M.facet_measure)
    cdf = np.cumsum(w) / w.sum()
    f = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), len(w) - 1)
    V = M.vertices[M.facets[f]]
    if M.N == 2:
        t = u[:, 1:2]
        return V[:, 0] + t * (V[:, 1] - V[:, 0]), f
    r1 = np.sqrt(u[:, 1:2])
    r2 = u[:, 2:3]
    return (1 - r1) * V[:, 0] + r1 * (1 - r2) * V[:, 1] + r1 * r2 * V[:, 2], f


class _PairLaw:
    """Proposal for the two distances ``(u, v)`` of a segment from its crossing point.

    ``q = (q_in(u) q_any(v) + q_any(u) q_in(v)) / 2`` where
    ``q_in(u) ~ u^-a`` on (0, D) covers the endpoint that lies in Omega and
    ``q_any`` mixes ``q_in`` with the tail law ``s D^s (v + D)^(-1-s)``.
    ``a = (1 + s) / 2`` keeps the weight variance finite at ``u + v -> 0``.
    """

    dim = 4

    def __init__(self, s, D):
        self.s, self.D = s, D
        self.a = 0.5 * (1.0 + s)

    def _q_in(self, x):
        a, D = self.a, self.D
        return np.where(x < D, (1 - a) * x ** (-a) / D ** (1 - a), 0.0)

    def _q_tail(self, x):
        return self.s * self.D ** self.s * (x + self.D) ** (-1 - self.s)

    def _q_any(self, x):
        return 0.5 * self._q_in(x) + 0.5 * self._q_tail(x)

    def sample(self, U):
        a, s, D = self.a, self.s, self.D
        x_in = D * U[:, 0] ** (1.0 / (1.0 - a))
        tail = U[:, 1] >= 0.5
        x_any = np.where(tail, D * (U[:, 2] ** (-1.0 / s) - 1.0), D * U[:, 2] ** (1.0 / (1.0 - a)))
        swap = U[:, 3] < 0.5
        u = np.where(swap, x_any, x_in)
        v = np.where(swap, x_in, x_any)
        q = 0.5 * (self._q_in(u) * self._q_any(v) + self._q_any(u) * self._q_in(v))
        return u, v, q


def per_s_estimate(M, omega: Domain, params: Params, spec: QuadratureSpec = QuadratureSpec(), *,
                   max_factor=True, tol=None):
    """Monte Carlo estimate of ``Per_s(M; Omega)``.

    Parameters
    ----------
    M : Hypersurface
        Closed or with boundary; must lie in the interior of ``omega``.
    omega : Domain
    params : Params
    spec : QuadratureSpec
        ``n_samples`` segments are drawn. A finite ``R_far`` keeps only
        segments whose endpoints are both within ``R_far`` of their
        crossing point; ``trunc_bound`` then bounds the discarded part.
        ``r_near`` is ignored (the integrand is not singular).
    max_factor : bool
        Debug switch. ``False`` drops ``max(chi_Omega(x), chi_Omega(y))``;
        the integral then diverges for surfaces with boundary, so a finite
        ``R_far`` is required and the estimate grows with it.

    Returns
    -------
    Estimate
    """
    N, s = params.N, params.s
    omega.check_contains(M)
    R_far = spec.R_far
    tol = M.fine_tol if tol is None else tol
    if max_factor:
        D = float(omega.far_distance(M.vertices).max())
    else:
        if not math.isfinite(R_far):
            raise ConfigError("max_factor=False needs a finite R_far")
        D = R_far
    law = _PairLaw(s, D)
    nu_f = np.asarray(M.facet_normals)
    scale = params.cN * M.measure * sphere_measure(N)
    n = int(spec.n_samples)

    def draw(count, stream):
        U = rng.open_uniforms(spec.seed, count, N + (N - 1) + law.dim, stream)
        p, f = _sample_on_surface(M, U[:, :N])
        theta = rng.unit_vectors(U[:, N:2 * N - 1])
        u, v, q = law.sample(U[:, 2 * N - 1:])
        X = p - u[:, None] * theta
        Y = p + v[:, None] * theta
        # p itself is one crossing; count the rest on the two half segments
        kx, fx = count_crossings(M, p, X, tol, skip_start=True, tol_ang=1e-12)
        ky, fy = count_crossings(M, p, Y, tol, skip_start=True, tol_ang=1e-12)
        k = 1 + kx + ky
        flag = fx | fy
        w = np.abs(np.einsum("ij,ij->i", theta, nu_f[f])) * (u + v) ** (-1.0 - s) / q
        w = np.where(k % 2 == 1, w / k, 0.0)
        if max_factor:
            w = w * (omega.contains(X) | omega.contains(Y))
        if math.isfinite(R_far):
            w = w * (np.maximum(u, v) <= R_far)
        return w, flag

    w, flag = draw(n, 0)
    bad = np.flatnonzero(flag)
    if bad.size > MAX_INDETERMINATE_RATE * n:
        raise NonConvergent(f"tangent rate {bad.size / n:.3e} exceeds {MAX_INDETERMINATE_RATE}")
    attempt = 0
    while bad.size:
        attempt += 1
        if attempt > MAX_RESAMPLE:
            raise NonConvergent("resample budget exhausted")
        wb, fb = draw(bad.size, attempt)
        w[bad] = wb
        bad = bad[fb]

    trunc = 0.0
    if max_factor and math.isfinite(R_far):
        # segments with one endpoint in Omega (within D) and the other beyond R_far
        trunc = area_constant(params) * M.measure * 2.0 * D * R_far ** (-s) / s
    return Estimate(
        value=float(scale * w.mean()),
        std_error=float(scale * w.std(ddof=1) / math.sqrt(n)),
        trunc_bound=float(trunc),
        n_eval=n,
        seed=int(spec.seed),
    )


# ---------------------------------------------------- classical P_s oracle
def _g(t, s):
    return t ** (1.0 - s) / (s * (1.0 - s))


def _pair_integral(l1, l2, r1, r2, s):
    """Integral of ``(b - a)^(-1-s)`` over ``a in [l1, l2]``, ``b in [r1, r2]``, ``l2 <= r1``.

    Infinite outer endpoints are allowed; the terms they would contribute
    cancel in the limit and are dropped.
    """
    fl = np.isfinite(l1)
    fr = np.isfinite(r2)
    out = -_g(np.maximum(r1 - l2, 0.0), s)
    out = out + np.where(fl, _g(np.where(fl, r1 - l1, 0.0), s), 0.0)
    out = out + np.where(fr, _g(np.where(fr, r2 - l2, 0.0), s), 0.0)
    out = out - np.where(fl & fr, _g(np.where(fl & fr, r2 - l1, 0.0), s), 0.0)
    return out


def _line_values(E: Region, omega: Domain, O, theta, s):
    """Exact 1D integral over pairs (a in E, b not in E, a or b in Omega) on each line."""
    n = len(O)
    tE = E.line_crossings(O, theta)
    w0, w1, hit = omega._convex_chord(O, theta)
    w0 = np.where(hit, w0, 0.0)
    w1 = np.where(hit, w1, 0.0)
    B = np.sort(np.concatenate([tE, w0[:, None], w1[:, None]], axis=1), axis=1)
    inf = np.full((n, 1), np.inf)
    L = np.concatenate([-inf, B], axis=1)
    R = np.concatenate([B, inf], axis=1)
    mid = np.where(np.isfinite(L) & np.isfinite(R), 0.5 * (L + R), np.nan)
    inE = ((tE[:, None, :] < mid[:, :, None]).sum(axis=2) % 2 == 1) & np.isfinite(mid)
    inW = (w0[:, None] < mid) & (mid < w1[:, None])
    total = np.zeros(n)
    m = L.shape[1]
    for i in range(m):
        for j in range(i + 1, m):
            mask = (inE[:, i] != inE[:, j]) & (inW[:, i] | inW[:, j])
            if mask.any():
                total[mask] += _pair_integral(L[mask, i], R[mask, i], L[mask, j], R[mask, j], s)
    return total


def classical_ps_oracle(E: Region, omega: Domain, params: Params, spec: QuadratureSpec = QuadratureSpec()):
    """Monte Carlo estimate of the classical ``P_s(E; Omega)``.

    Random lines meeting the bounding ball of ``E`` are drawn uniformly
    (direction uniform on the sphere, offset uniform in the orthogonal
    disk). Along each line the pair integral is evaluated in closed form,
    so the only randomness is the choice of line. ``cN`` does not enter.
    """
    N, s = E.N, params.s
    if E.kind == "empty":
        return Estimate(0.0, 0.0, 0.0, 0, int(spec.seed))
    c, rad = E.bounding_ball
    n = int(spec.n_samples)
    U = rng.open_uniforms(spec.seed, n, 2 * (N - 1), 0)
    theta = rng.unit_vectors(U[:, : N - 1])
    # uniform offset in the disk orthogonal to theta
    if N == 2:
        off = (2 * U[:, 1] - 1)[:, None] * rad * np.stack([-theta[:, 1], theta[:, 0]], axis=1)
    else:
        helper = np.where(np.abs(theta[:, :1]) < 0.9, [[1.0, 0, 0]], [[0, 1.0, 0]])
        e1 = np.cross(theta, helper)
        e1 /= np.linalg.norm(e1, axis=1)[:, None]
        e2 = np.cross(theta, e1)
        rr = rad * np.sqrt(U[:, 2])
        ph = 2 * np.pi * U[:, 3]
        off = (rr * np.cos(ph))[:, None] * e1 + (rr * np.sin(ph))[:, None] * e2
    O = c + off
    vals = _line_values(E, omega, O, theta, s)
    scale = 0.5 * sphere_measure(N) * _ball_volume(N - 1, rad)
    return Estimate(
        value=float(scale * vals.mean()),
        std_error=float(scale * vals.std(ddof=1) / math.sqrt(n)),
        trunc_bound=0.0,
        n_eval=n,
        seed=int(spec.seed),
    )


def classical_ps_quadrature(E: Region, omega: Domain, params: Params, epsrel=1e-8):
    """Deterministic ``P_s(E; Omega)`` for planar regions.

    Nested adaptive quadrature over line angle ``phi in (0, pi)`` and
    offset ``p``; the pair integral along each line is exact. When ``E``
    and ``Omega`` are concentric disks the angular integral is trivial.
    """
    if E.N != 2:
        raise ConfigError("deterministic quadrature is planar only")
    if E.kind == "empty":
        return Estimate(0.0)
    s = params.s
    c, rad = E.bounding_ball

    def line(phi, p):
        th = np.array([[math.cos(phi), math.sin(phi)]])
        O = c + p * np.array([[-th[0, 1], th[0, 0]]])
        return float(_line_values(E, omega, O, th, s)[0])

    concentric = (E.kind == "ball" and omega.kind == "ball"
                  and np.allclose(E.data[0], omega.data[0]))
    if concentric:
        val, err = integrate.quad(lambda p: line(0.0, p), -rad, rad, epsrel=epsrel, limit=200)
        return Estimate(float(math.pi * val), 0.0, float(math.pi * err), 0)

    def inner(phi):
        return integrate.quad(lambda p: line(phi, p), -rad, rad, epsrel=epsrel, limit=200)[0]

    val, err = integrate.quad(inner, 0.0, math.pi, epsrel=epsrel, limit=200)
    return Estimate(float(val), 0.0, float(err), 0)


# ------------------------------------------------------------ s -> 1 scan
def richardson_weights(x):
    """Weights ``w`` with ``sum w_i f(x_i)`` exact at ``x = 0`` for polynomials of degree < len(x)."""
    x = np.asarray(x, dtype=float)
    w = np.ones(len(x))
    for i in range(len(x)):
        for j in range(len(x)):
            if i != j:
                w[i] *= (0.0 - x[j]) / (x[i] - x[j])
    return w


@dataclass
class ScanResult:
    """Rows of the ``s -> 1`` scan plus the extrapolated limit.

    ``limit`` estimates ``lim (1 - s) Per_s`` at ``s = 1`` (``None`` for a
    single row); ``limit_std`` is its standard error.
    ``trend`` is ``"increasing"``, ``"decreasing"`` or ``"mixed"``.
    """

    rows: list
    limit: float | None
    limit_std: float | None
    trend: str

    def to_csv(self):
        buf = io.StringIO()
        cols = ["s", "estimate", "std_error", "trunc_bound", "n_eval", "seed"]
        wr = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        wr.writeheader()
        for r in self.rows:
            wr.writerow(r)
        return buf.getvalue()


def area_limit_scan(M, omega, params_list, spec: QuadratureSpec = QuadratureSpec()):
    """Tabulate ``(1 - s) Per_s(M; Omega)`` over increasing ``s`` and extrapolate to 1.

    Each row holds ``s``, the raw ``Per_s`` estimate (``estimate``,
    ``std_error``, ``trunc_bound``, ``n_eval``, ``seed``) and the scaled
    value ``scaled = (1 - s) * estimate`` with ``scaled_std``.

    The limit is the polynomial extrapolation in ``(1 - s)`` of
    ``s * scaled``. For a flat piece ``(1 - s) Per_s`` equals ``1/s`` times
    an average of ``chord^(1 - s)``, and removing the ``1/s`` leaves an
    exponential-type function that low-degree interpolation follows closely.
    """
    ss = [p.s for p in params_list]
    if any(b <= a for a, b in zip(ss, ss[1:])):
        raise ConfigError("s values must be strictly increasing")
    rows = []
    for p in params_list:
        est = per_s_estimate(M, omega, p, spec)
        row = est.to_dict()
        row["s"] = p.s
        row["estimate"] = row.pop("value")
        row["scaled"] = (1 - p.s) * est.value
        row["scaled_std"] = (1 - p.s) * est.std_error
        rows.append(row)
    scaled = np.array([r["scaled"] for r in rows])
    if len(rows) == 1:
        return ScanResult(rows, None, None, "n/a")
    # s (1 - s) Per_s has the same limit but no 1/s factor, which makes it
    # far closer to a low-degree polynomial in (1 - s)
    w = richardson_weights([1 - x for x in ss]) * np.array(ss)
    limit = float(w @ scaled)
    limit_std = float(np.sqrt(np.sum((w * [r["scaled_std"] for r in rows]) ** 2)))
    d = np.diff(scaled)
    trend = "increasing" if np.all(d > 0) else "decreasing" if np.all(d < 0) else "mixed"
    return ScanResult(rows, limit, limit_std, trend)
