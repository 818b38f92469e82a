"""Oriented hypersurfaces with boundary: polylines in the plane, triangle meshes in space.

A :class:`Hypersurface` is immutable once built. Facet normals define the
orientation; for a polyline the normal of a segment is its direction
rotated by +90 degrees, for a triangle it is the right-hand normal of
its vertex order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    DegenerateFacet,
    GeometryError,
    NonManifoldEdge,
    NonOrientable,
    SelfIntersection,
)

__all__ = [
    "Params",
    "Segment",
    "Hypersurface",
    "sphere_measure",
    "build_polyline",
    "build_polylines",
    "build_trimesh",
    "intersect_count",
    "count_crossings",
    "tangent_frame",
    "read_off",
    "write_off",
    "read_polyline_csv",
    "write_polyline_csv",
]

MIN_FACET = 1e-14


def sphere_measure(n):
    """Surface measure of the unit sphere in R^n (2 for n=1, 2*pi for n=2, 4*pi for n=3)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class Params:
    """Dimension ``N``, fractional order ``s`` and the normalisation ``cN``.

    ``cN`` defaults to 1; every sign or vanishing statement is independent of it.
    """

    N: int
    s: float
    cN: float = 1.0

    def __post_init__(self):
        if self.N not in (2, 3):
            raise ValueError(f"N must be 2 or 3, got {self.N}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if not self.cN > 0.0:
            raise ValueError(f"cN must be positive, got {self.cN}")


@dataclass(frozen=True)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or np.array_equal(a, b):
            raise ValueError("segment endpoints must be distinct points of equal dimension")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def _readonly(arr, dtype):
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Hypersurface:
    """Oriented polyline (N=2) or triangle mesh (N=3) with explicit boundary.

    Attributes
    ----------
    vertices : (V, N) float array
    facets : (F, N) int array
        Segments for N=2, triangles for N=3.
    facet_normals : (F, N) float array of unit normals.
    boundary : tuple of int arrays
        N=2: one single-vertex array per chain endpoint.
        N=3: closed vertex loops made of single-incidence edges.
    is_closed : bool
    """

    vertices: np.ndarray
    facets: np.ndarray
    facet_normals: np.ndarray
    boundary: tuple
    is_closed: bool

    @property
    def N(self):
        return self.vertices.shape[1]

    @property
    def n_facets(self):
        return self.facets.shape[0]

    @cached_property
    def facet_measure(self):
        V = self.vertices[self.facets]
        if self.N == 2:
            return np.linalg.norm(V[:, 1] - V[:, 0], axis=1)
        return 0.5 * np.linalg.norm(np.cross(V[:, 1] - V[:, 0], V[:, 2] - V[:, 0]), axis=1)

    @cached_property
    def measure(self):
        """Length (N=2) or area (N=3)."""
        return float(self.facet_measure.sum())

    @cached_property
    def barycenters(self):
        return self.vertices[self.facets].mean(axis=1)

    @cached_property
    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @cached_property
    def diam(self):
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    @cached_property
    def default_tol(self):
        """Geometric tolerance for plain crossing queries: 1e-9 times the bounding-box diameter."""
        return 1e-9 * max(self.diam, 1e-300)

    @cached_property
    def fine_tol(self):
        """Round-off scale tolerance (1e-12 times the diameter) used inside curvature integrals."""
        return 1e-12 * max(self.diam, 1e-300)

    @cached_property
    def boundary_vertices(self):
        if not self.boundary:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(self.boundary))

    @cached_property
    def boundary_facets(self):
        """Facets of the boundary: single vertices (N=2) or boundary edges (N=3)."""
        if self.N == 2:
            return self.boundary_vertices.reshape(-1, 1)
        edges = [np.stack([r, np.roll(r, -1)], axis=1) for r in self.boundary]
        return np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)

    @cached_property
    def _kernel_arrays(self):
        V = np.ascontiguousarray(self.vertices)
        F = self.facets
        lo = V[F].min(axis=1)
        hi = V[F].max(axis=1)
        fbox = np.ascontiguousarray(np.stack([lo, hi], axis=2).reshape(len(F), -1))
        if self.N == 2:
            return (np.ascontiguousarray(V[F[:, 0]]), np.ascontiguousarray(V[F[:, 1]]), fbox)
        V0 = np.ascontiguousarray(V[F[:, 0]])
        E1 = np.ascontiguousarray(V[F[:, 1]] - V0)
        E2 = np.ascontiguousarray(V[F[:, 2]] - V0)
        # smallest altitude of each triangle turns a length tolerance into a barycentric one
        edges = np.stack([E1, E2, E2 - E1], axis=1)
        longest = np.linalg.norm(edges, axis=2).max(axis=1)
        alt = 2.0 * self.facet_measure / longest
        return V0, E1, E2, fbox, 1.0 / alt

    @cached_property
    def chains(self):
        """Vertex sequences of the polyline components (N=2 only)."""
        if self.N != 2:
            raise GeometryError("chains are defined for polylines only")
        return _trace_chains(self.facets, len(self.vertices))

    def transformed(self, R=None, t=None):
        """Image under x -> R x + t (R orthogonal). Normals are transported by R."""
        R = np.eye(self.N) if R is None else np.asarray(R, dtype=float)
        t = np.zeros(self.N) if t is None else np.asarray(t, dtype=float)
        V = self.vertices @ R.T + t
        F = self.facets
        if np.linalg.det(R) < 0:
            # a reflection reverses the winding convention; rewind so normals are transported
            F = F[:, ::-1].copy() if self.N == 2 else F[:, [0, 2, 1]]
        return Hypersurface(_readonly(V, float), _readonly(F, np.int64),
                            _readonly(self.facet_normals @ R.T, float), self.boundary, self.is_closed)

    def flipped(self):
        """Same point set with the opposite orientation."""
        F = self.facets[:, ::-1].copy() if self.N == 2 else self.facets[:, [0, 2, 1]]
        return Hypersurface(self.vertices, _readonly(F, np.int64),
                            _readonly(-self.facet_normals, float), self.boundary, self.is_closed)

    def locate(self, z, tol=None):
        """Indices of facets containing the point ``z`` within ``tol``."""
        tol = self.default_tol * 10 if tol is None else tol
        d = point_facet_distances(self, np.asarray(z, dtype=float))
        return np.flatnonzero(d <= tol)


def _facet_normals(V, F):
    if V.shape[1] == 2:
        d = V[F[:, 1]] - V[F[:, 0]]
        n = np.stack([-d[:, 1], d[:, 0]], axis=1)
    else:
        n = np.cross(V[F[:, 1]] - V[F[:, 0]], V[F[:, 2]] - V[F[:, 0]])
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def _trace_chains(S, nv):
    nxt = -np.ones(nv, dtype=np.int64)
    prv = -np.ones(nv, dtype=np.int64)
    for a, b in S:
        nxt[a] = b
        prv[b] = a
    seen = np.zeros(nv, dtype=bool)
    used = np.zeros(nv, dtype=bool)
    used[S.ravel()] = True
    chains = []
    starts = [v for v in range(nv) if used[v] and prv[v] < 0]
    for v0 in starts:
        seq = [v0]
        seen[v0] = True
        v = v0
        while nxt[v] >= 0:
            v = nxt[v]
            seq.append(v)
            seen[v] = True
        chains.append(np.array(seq))
    for v0 in range(nv):
        if used[v0] and not seen[v0]:
            seq = [v0]
            seen[v0] = True
            v = nxt[v0]
            while v != v0:
                seq.append(v)
                seen[v] = True
                v = nxt[v]
            seq.append(v0)
            chains.append(np.array(seq))
    return chains


def build_polylines(chains, closed=False, check_intersections=True):
    """Union of oriented polyline chains (each a sequence of points).

    ``closed`` may be a single flag or one flag per chain. Each chain keeps
    its point order, which fixes its orientation.
    """
    if not chains:
        raise GeometryError("at least one chain is required")
    flags = [closed] * len(chains) if np.isscalar(closed) else list(closed)
    verts, segs, boundary = [], [], []
    off = 0
    for pts, cl in zip(chains, flags):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise GeometryError("a chain needs at least two planar points")
        if cl and len(pts) > 2 and np.array_equal(pts[0], pts[-1]):
            pts = pts[:-1]
        m = len(pts)
        idx = np.arange(m) + off
        if cl:
            if m < 3:
                raise GeometryError("a closed chain needs at least three points")
            s = np.stack([idx, np.roll(idx, -1)], axis=1)
        else:
            s = np.stack([idx[:-1], idx[1:]], axis=1)
            boundary += [np.array([idx[0]]), np.array([idx[-1]])]
        verts.append(pts)
        segs.append(s)
        off += m
    V = np.concatenate(verts)
    S = np.concatenate(segs)
    lengths = np.linalg.norm(V[S[:, 1]] - V[S[:, 0]], axis=1)
    if np.any(lengths <= MIN_FACET):
        raise DegenerateFacet(f"segment {int(np.argmin(lengths))} has length {lengths.min():.3e}")
    if check_intersections and len(S) > 1:
        diam = float(np.linalg.norm(V.max(0) - V.min(0)))
        i, j = _kernels.first_polyline_crossing(np.ascontiguousarray(V), np.ascontiguousarray(S), 1e-12 * diam)
        if i >= 0:
            raise SelfIntersection(f"segments {i} and {j} intersect")
    return Hypersurface(_readonly(V, float), _readonly(S, np.int64), _readonly(_facet_normals(V, S), float),
                        tuple(_readonly(b, np.int64) for b in boundary), not boundary)


def build_polyline(points, closed=False):
    """Single oriented polyline; normals are the segment directions rotated by +90 degrees."""
    return build_polylines([points], closed=closed)


def build_trimesh(vertices, triangles, orient=True):
    """Triangle mesh with unit normals and boundary loops.

    Inconsistently wound (but orientable) input is re-wound to agree with
    the first triangle of each connected component when ``orient`` is set;
    otherwise mismatched windings raise :class:`NonOrientable`.
    """
    V = np.asarray(vertices, dtype=float)
    T = np.array(triangles, dtype=np.int64)
    if V.ndim != 2 or V.shape[1] != 3 or T.ndim != 2 or T.shape[1] != 3:
        raise GeometryError("expected (V,3) vertices and (F,3) triangles")
    if T.min() < 0 or T.max() >= len(V):
        raise GeometryError("triangle index out of range")
    area = 0.5 * np.linalg.norm(np.cross(V[T[:, 1]] - V[T[:, 0]], V[T[:, 2]] - V[T[:, 0]]), axis=1)
    if np.any(area <= MIN_FACET):
        raise DegenerateFacet(f"triangle {int(np.argmin(area))} has area {area.min():.3e}")

    incident = {}
    for f, tri in enumerate(T):
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            incident.setdefault((min(a, b), max(a, b)), []).append(f)
    for e, fs in incident.items():
        if len(fs) > 2:
            raise NonManifoldEdge(f"edge {e} has {len(fs)} incident triangles")

    def directed(f, a, b):
        tri = list(T[f])
        i = tri.index(a)
        return tri[(i + 1) % 3] == b

    # breadth-first propagation of a consistent winding
    flip = np.zeros(len(T), dtype=np.int8)
    state = -np.ones(len(T), dtype=np.int8)
    adj = [[] for _ in range(len(T))]
    for (a, b), fs in incident.items():
        if len(fs) == 2:
            f, g = fs
            # same direction in both triangles means they disagree
            same = directed(f, a, b) == directed(g, a, b)
            adj[f].append((g, same))
            adj[g].append((f, same))
    for root in range(len(T)):
        if state[root] >= 0:
            continue
        state[root] = 0
        stack = [root]
        while stack:
            f = stack.pop()
            for g, same in adj[f]:
                want = state[f] ^ int(same)
                if state[g] < 0:
                    state[g] = want
                    stack.append(g)
                elif state[g] != want:
                    raise NonOrientable("no consistent orientation exists")
    flip = state.astype(bool)
    if flip.any():
        if not orient:
            raise NonOrientable("inconsistent triangle winding")
        T[flip] = T[flip][:, [0, 2, 1]]

    # boundary loops from single-incidence directed edges
    nxt = {}
    for (a, b), fs in incident.items():
        if len(fs) == 1:
            f = fs[0]
            if directed(f, a, b):
                nxt[a] = b
            else:
                nxt[b] = a
    rings = []
    remaining = dict(nxt)
    while remaining:
        v0 = min(remaining)
        ring = [v0]
        v = remaining.pop(v0)
        while v != v0:
            ring.append(v)
            if v not in remaining:
                raise NonManifoldEdge("boundary is not a union of simple loops")
            v = remaining.pop(v)
        rings.append(_readonly(ring, np.int64))
    return Hypersurface(_readonly(V, float), _readonly(T, np.int64), _readonly(_facet_normals(V, T), float),
                        tuple(rings), not rings)


def count_crossings(M, A, B, tol=None, skip_start=False, tol_ang=1e-9):
    """Vectorised crossing counts of segments [A[i], B[i]] with ``M``.

    Returns ``(counts, flags)``; see :func:`intersect_count`.
    """
    tol = M.default_tol if tol is None else float(tol)
    A = np.ascontiguousarray(np.atleast_2d(A), dtype=float)
    B = np.ascontiguousarray(np.atleast_2d(B), dtype=float)
    ka = M._kernel_arrays
    if M.N == 2:
        return _kernels.crossings_2d(A, B, ka[0], ka[1], ka[2], tol, tol_ang, skip_start)
    btol = ka[4] * tol
    return _kernels.crossings_3d(A, B, ka[0], ka[1], ka[2], ka[3], btol, tol, tol_ang, skip_start)


def intersect_count(seg, M, tol=None, skip_start=False, tol_ang=1e-9):
    """Number of transversal crossings of a segment with ``M`` and a reliability flag.

    The flag is raised when an intersection lies within ``tol`` of a facet
    edge or vertex, when the segment is (nearly) tangent to a facet it
    meets (sine of the angle below ``tol_ang``), or when an endpoint of
    the segment lies on ``M``. With
    ``skip_start`` an intersection at ``seg.a`` is not counted and not
    flagged (the base point of a curvature evaluation lies on ``M``).
    """
    c, f = count_crossings(M, seg.a[None], seg.b[None], tol=tol, skip_start=skip_start, tol_ang=tol_ang)
    return int(c[0]), bool(f[0])


def _point_segment_dist(x, P, Q):
    d = Q - P
    w = x - P
    t = np.clip(np.einsum("ij,ij->i", w, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
    return np.linalg.norm(w - t[:, None] * d, axis=1)


def point_facet_distances(M, x):
    """Distance from the point ``x`` to every facet of ``M``."""
    V = M.vertices[M.facets]
    if M.N == 2:
        return _point_segment_dist(x, V[:, 0], V[:, 1])
    a, b, c = V[:, 0], V[:, 1], V[:, 2]
    n = np.cross(b - a, c - a)
    nn = np.linalg.norm(n, axis=1)
    n = n / nn[:, None]
    h = np.einsum("ij,ij->i", x - a, n)
    p = x - h[:, None] * n
    # barycentric coordinates of the projection
    v0, v1, v2 = b - a, c - a, p - a
    d00 = np.einsum("ij,ij->i", v0, v0)
    d01 = np.einsum("ij,ij->i", v0, v1)
    d11 = np.einsum("ij,ij->i", v1, v1)
    d20 = np.einsum("ij,ij->i", v2, v0)
    d21 = np.einsum("ij,ij->i", v2, v1)
    den = d00 * d11 - d01 * d01
    v = (d11 * d20 - d01 * d21) / den
    w = (d00 * d21 - d01 * d20) / den
    inside = (v >= 0) & (w >= 0) & (v + w <= 1)
    edge = np.minimum(np.minimum(_point_segment_dist(x, a, b), _point_segment_dist(x, b, c)),
                      _point_segment_dist(x, c, a))
    return np.where(inside, np.abs(h), edge)


def distance_to_surface(M, X):
    """Unsigned distance from each row of ``X`` to ``M``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.array([point_facet_distances(M, x).min() for x in X])


def distance_to_boundary(M, x):
    """Distance from ``x`` to the boundary of ``M`` (inf if closed)."""
    if M.is_closed:
        return math.inf
    x = np.asarray(x, dtype=float)
    if M.N == 2:
        return float(np.linalg.norm(M.vertices[M.boundary_vertices] - x, axis=1).min())
    E = M.boundary_facets
    return float(_point_segment_dist(x, M.vertices[E[:, 0]], M.vertices[E[:, 1]]).min())


def tangent_frame(nu):
    """Orthonormal frame whose last column is ``nu``.

    In the plane the frame is the rotation taking e_2 to ``nu``, so it is
    transported exactly by rotations. In space a Householder completion is
    used.
    """
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    if nu.shape[0] == 2:
        return np.array([[nu[1], nu[0]], [-nu[0], nu[1]]])
    e = np.array([0.0, 0.0, 1.0]) if nu[2] >= 0 else np.array([0.0, 0.0, -1.0])
    v = nu - e
    if np.linalg.norm(v) < 1e-15:
        H = np.eye(3)
    else:
        H = np.eye(3) - 2.0 * np.outer(v, v) / (v @ v)
    Q = H @ np.diag([1.0, 1.0, e[2]])
    # columns 0,1 span the tangent plane, column 2 equals nu
    Q[:, 2] = nu
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


# ---------------------------------------------------------------- file formats

def write_off(M, path):
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(M.vertices)} {M.n_facets} 0\n")
        for v in M.vertices:
            fh.write(" ".join(repr(float(c)) for c in v) + "\n")
        for f in M.facets:
            fh.write(f"{len(f)} " + " ".join(str(int(i)) for i in f) + "\n")


def read_off(path):
    tokens = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise GeometryError("not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    V = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
    pos += 3 * nv
    F = []
    for _ in range(nf):
        k = int(tokens[pos])
        F.append([int(t) for t in tokens[pos + 1:pos + 1 + k]])
        pos += 1 + k
    if any(len(f) != 3 for f in F):
        raise GeometryError("only triangular OFF facets are supported")
    return build_trimesh(V, F)


def write_polyline_csv(M, path):
    """Two-column CSV (x, y); chains are separated by an empty row."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y"])
        for k, ch in enumerate(M.chains):
            if k:
                w.writerow([])
            for v in ch:
                w.writerow([repr(float(M.vertices[v, 0])), repr(float(M.vertices[v, 1]))])


def read_polyline_csv(path):
    chains, cur = [], []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    for row in rows[1:]:
        if not row:
            if cur:
                chains.append(cur)
            cur = []
            continue
        cur.append([float(row[0]), float(row[1])])
    if cur:
        chains.append(cur)
    closed = [len(c) > 2 and c[0] == c[-1] for c in chains]
    return build_polylines(chains, closed=closed)
