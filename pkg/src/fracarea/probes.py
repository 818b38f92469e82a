"""Sliding probes: move a hyperplane or a ball until it first touches ``M``.

At an interior touching point a critical surface must have vanishing
fractional mean curvature, so a curvature estimate whose interval
excludes zero there rules criticality out. Touching points on the
boundary of ``M`` are reported but not evaluated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .curvature import Estimate, QuadratureSpec, fmc_estimate
from .errors import ConfigError, PointNotOnSurface
from .geometry import Params, distance_to_boundary, point_facet_distances
from .sides import normal_at

__all__ = ["Verdict", "ContactReport", "slide_hyperplane", "slide_ball", "closest_point"]

CLUSTER_REL_TOL = 1e-6


class Verdict(str, Enum):
    CONSISTENT = "ConsistentWithCritical"
    VIOLATES = "ViolatesCriticality"
    NO_CONTACT = "NoContact"


@dataclass
class ContactReport:
    """Outcome of a sliding probe.

    ``contact_points`` lists every touching point (clustered),
    ``evaluated_points`` the interior ones where ``fmc_at_contact`` was
    computed, and ``boundary_contacts`` those skipped for lying on the
    boundary of ``M``.
    """

    lambda_star: float | None
    contact_points: list
    fmc_at_contact: list
    verdict: Verdict
    evaluated_points: list = field(default_factory=list)
    boundary_contacts: list = field(default_factory=list)

    def to_dict(self):
        return {
            "lambda_star": self.lambda_star,
            "contact_points": [list(map(float, p)) for p in self.contact_points],
            "fmc_at_contact": [e.to_dict() for e in self.fmc_at_contact],
            "verdict": self.verdict.value,
            "evaluated_points": [list(map(float, p)) for p in self.evaluated_points],
            "boundary_contacts": [list(map(float, p)) for p in self.boundary_contacts],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        d["fmc_at_contact"] = [Estimate(**e) for e in d["fmc_at_contact"]]
        d["verdict"] = Verdict(d["verdict"])
        return cls(**d)


def _verdict(estimates):
    if not estimates:
        return Verdict.NO_CONTACT
    if any(abs(e.value) > e.halfwidth for e in estimates):
        return Verdict.VIOLATES
    return Verdict.CONSISTENT


def _evaluate(M, z, nu, params, spec):
    """fmc at a touching point; falls back to an explicit excision radius at creases."""
    try:
        nu_f = normal_at(M, z)
        return fmc_estimate(M, z, nu_f, params, spec)
    except PointNotOnSurface:
        pass
    # vertex touching point: the probe's own normal is the tangent plane there
    d = point_facet_distances(M, z)
    near = d <= 10.0 * M.default_tol
    lens = np.sqrt(M.facet_measure[near]) if M.N == 3 else M.facet_measure[near]
    r_near = 0.5 * min(float(lens.min()), distance_to_boundary(M, z))
    if spec.r_near is not None:
        r_near = min(r_near, spec.r_near)
    return fmc_estimate(M, z, nu, params, replace(spec, r_near=r_near))


def _is_boundary(M, z, spec):
    thr = CLUSTER_REL_TOL * M.diam if spec.r_near is None else spec.r_near
    return distance_to_boundary(M, z) <= thr


def slide_hyperplane(M, axis, direction=1, params: Params | None = None, spec: QuadratureSpec = QuadratureSpec()):
    """Slide ``{x . axis = lambda}`` along ``direction * axis`` until it touches ``M``.

    Parameters
    ----------
    M : Hypersurface
    axis : unit vector
    direction : +1 slides from below (increasing lambda), -1 from above.
    params, spec : curvature settings for the touching points.

    Returns
    -------
    ContactReport
        ``lambda_star`` is the exact support value (min or max of the
        vertex coordinates along ``axis``). Touching vertices are grouped into
        connected clusters, each evaluated once at the interior touching-facet
        barycenter nearest its centroid (or at a vertex if no facet touches).
    """
    if direction not in (1, -1):
        raise ConfigError("direction must be +1 or -1")
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    params = params or Params(M.N, 0.5)
    proj = M.vertices @ axis
    lam = float(proj.min() if direction == 1 else proj.max())
    tol = CLUSTER_REL_TOL * M.diam
    touch = np.abs(proj - lam) <= tol
    flat = np.flatnonzero(np.all(touch[M.facets], axis=1))
    clusters = _clusters(np.flatnonzero(touch), M.facets[flat])
    nu = direction * axis
    contacts, ests, evaluated, bdry = [], [], [], []
    for verts in clusters:
        pts = [M.vertices[v] for v in sorted(verts)]
        contacts += pts
        bdry += [p for p in pts if _is_boundary(M, p, spec)]
        # evaluation candidates: barycenters of touching facets, else the vertices
        cands = [M.barycenters[f] for f in flat if int(M.facets[f][0]) in verts] or pts
        inner = [z for z in cands if not _is_boundary(M, z, spec)]
        if not inner:
            continue
        center = np.mean(pts, axis=0)
        z = min(inner, key=lambda q: float(np.linalg.norm(q - center)))
        ests.append(_evaluate(M, z, nu, params, spec))
        evaluated.append(z)
    return ContactReport(lam, contacts, ests, _verdict(ests), evaluated, bdry)


def _clusters(vertices, facets):
    """Connected groups of touching vertices, linked through touching facets."""
    parent = {int(v): int(v) for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for f in facets:
        r0 = find(int(f[0]))
        for v in f[1:]:
            parent[find(int(v))] = r0
    groups = {}
    for v in parent:
        groups.setdefault(find(v), set()).add(v)
    return [groups[k] for k in sorted(groups)]


def closest_point(M, x):
    """Nearest point of ``M`` to ``x``."""
    x = np.asarray(x, dtype=float)
    d = point_facet_distances(M, x)
    f = int(np.argmin(d))
    V = M.vertices[M.facets[f]]
    if M.N == 2:
        e = V[1] - V[0]
        t = np.clip((x - V[0]) @ e / (e @ e), 0.0, 1.0)
        return V[0] + t * e
    n = M.facet_normals[f]
    p = x - ((x - V[0]) @ n) * n
    if abs(np.linalg.norm(p - x) - d[f]) <= 1e-12 * max(1.0, d[f]):
        return p
    best, bd = None, math.inf
    for a, b in ((V[0], V[1]), (V[1], V[2]), (V[2], V[0])):
        e = b - a
        q = a + np.clip((x - a) @ e / (e @ e), 0.0, 1.0) * e
        dq = np.linalg.norm(x - q)
        if dq < bd:
            best, bd = q, dq
    return best


def slide_ball(M, radius, height, params: Params | None = None, spec: QuadratureSpec = QuadratureSpec(), *,
               axis=None, t_start=None, t_end=None, max_iter=100_000):
    """Slide a ball of ``radius`` along ``t -> t axis + height e_N`` until it touches ``M``.

    The distance to ``M`` is 1-Lipschitz in ``t``, so stepping by
    ``dist - radius`` never jumps over the first contact. The path starts
    left of ``M`` and ends right of it by default.

    Returns
    -------
    ContactReport
        ``lambda_star`` is the contact parameter ``t`` (``None`` without
        contact); the curvature is evaluated at the nearest surface point
        with the normal pointing toward the ball center.
    """
    if not radius > 0:
        raise ConfigError("radius must be positive")
    N = M.N
    params = params or Params(N, 0.5)
    axis = np.eye(N)[0] if axis is None else np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    proj = M.vertices @ axis
    t = proj.min() - radius - 1.0 if t_start is None else float(t_start)
    t_end = proj.max() + radius + 1.0 if t_end is None else float(t_end)
    base = height * np.eye(N)[-1]
    tol = CLUSTER_REL_TOL * M.diam
    for _ in range(max_iter):
        c = base + t * axis
        gap = float(point_facet_distances(M, c).min()) - radius
        if gap <= tol:
            break
        t += gap
        if t > t_end:
            return ContactReport(None, [], [], Verdict.NO_CONTACT)
    else:
        return ContactReport(None, [], [], Verdict.NO_CONTACT)
    q = closest_point(M, c)
    nu = (c - q) / np.linalg.norm(c - q)
    if _is_boundary(M, q, spec):
        return ContactReport(float(t), [q], [], Verdict.NO_CONTACT, [], [q])
    est = _evaluate(M, q, nu, params, spec)
    # report with the normal toward the ball, whatever the mesh orientation
    nu_m = None
    try:
        nu_m = normal_at(M, q)
    except PointNotOnSurface:
        pass
    if nu_m is not None and nu_m @ nu < 0:
        est = replace(est, value=-est.value)
    return ContactReport(float(t), [q], [est], _verdict([est]), [q], [])
