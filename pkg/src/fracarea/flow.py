"""Normal-variation descent for planar curves with pinned end points.

The curve is a union of open chains whose end points lie on the rings
``Gamma_1 = {(+-1, 0)}`` and ``Gamma_2 = {(+-1, -d)}``. Every step moves
the interior vertices along the normal by ``dt * H``, where ``H`` is the
fractional mean curvature of :mod:`fracarea.curvature`. With that sign
convention (a convex closed curve with outward normal has ``H < 0``)
the velocity ``H nu`` lowers ``Per_s``.

``H`` is evaluated exactly at edge midpoints by the compiled polar
sweep; vertex velocities average the two adjacent edges. After the move
each chain is resampled by arclength on a cubic spline, clamped to the
slab ``-d <= x2 <= 0`` and checked for topology changes: two pieces
closer than ``topology_merge_dist`` are cut and reconnected.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from . import _kernels
from .area import Domain, per_s_estimate
from .curvature import QuadratureSpec, fmc_estimate
from .errors import ConfigError, InvalidState, StepRejected
from .geometry import Params, build_polylines

__all__ = [
    "FlowConfig",
    "FlowState",
    "initial_state",
    "polyline_curvature",
    "flow_step",
    "flow_run",
    "FlowResult",
    "connectivity_report",
    "audit_state",
    "regime_scan",
    "TRACE_COLUMNS",
]

TRACE_COLUMNS = ["step", "time", "sup_H", "n_components", "min_component_gap", "min_wall_gap",
                 "min_abs_x1", "max_abs_x1", "per_s_estimate", "per_s_std_error", "dt", "n_projections"]


@dataclass(frozen=True)
class FlowConfig:
    """Controls of :func:`flow_run`.

    ``dt = dt_safety * h_target^(1+s)``; ``topology_merge_dist`` defaults
    to ``h_target / 2``. ``log_every`` sets the trace interval and
    ``per_s_samples`` the sample count of the logged ``Per_s`` estimate
    (0 disables it).
    """

    d: float
    dt_safety: float = 0.1
    h_target: float = 0.05
    max_steps: int = 2000
    stop_tol: float = 0.05
    topology_merge_dist: float | None = None
    seed: int = 0
    log_every: int = 10
    per_s_samples: int = 0
    max_halvings: int = 10

    def __post_init__(self):
        if not self.d > 0:
            raise ConfigError("d must be positive")
        if not 0 < self.dt_safety < 1:
            raise ConfigError("dt_safety must lie in (0, 1)")
        if not self.h_target > 0:
            raise ConfigError("h_target must be positive")
        if self.topology_merge_dist is not None and not 0 < self.topology_merge_dist < self.h_target:
            raise ConfigError("topology_merge_dist must lie in (0, h_target)")

    @property
    def merge_dist(self):
        return self.h_target / 2 if self.topology_merge_dist is None else self.topology_merge_dist

    def dt(self, s):
        return self.dt_safety * self.h_target ** (1.0 + s)


@dataclass(frozen=True)
class FlowState:
    """A configuration of the flow.

    ``chains`` holds the point sequences; ``curve``, ``fixed_vertices``
    and ``component_labels`` are derived from them. ``per_vertex_H`` is the
    curvature used for the last move (empty before the first step).
    """

    chains: tuple
    d: float
    time: float = 0.0
    step_count: int = 0
    per_vertex_H: tuple = ()
    dt: float | None = None
    n_projections: int = 0
    n_surgeries: int = 0

    @property
    def curve(self):
        return build_polylines(list(self.chains), check_intersections=False)

    @property
    def rings(self):
        d = self.d
        return {"Gamma1": np.array([[-1.0, 0.0], [1.0, 0.0]]), "Gamma2": np.array([[-1.0, -d], [1.0, -d]])}

    @property
    def fixed_vertices(self):
        """Indices (into ``curve.vertices``) of chain end points."""
        out, off = [], 0
        for c in self.chains:
            out += [off, off + len(c) - 1]
            off += len(c)
        return tuple(out)

    @property
    def component_labels(self):
        rep = connectivity_report(self)
        return tuple(np.concatenate([np.full(len(c), rep["chain_component"][i]) for i, c in enumerate(self.chains)]))

    def interior_points(self):
        return np.concatenate([c[1:-1] for c in self.chains]) if self.chains else np.zeros((0, 2))

    def to_csv(self):
        """Polyline CSV: x,y rows with a blank row between chains."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        for k, c in enumerate(self.chains):
            if k:
                w.writerow([])
            w.writerows([[repr(float(x)), repr(float(y))] for x, y in c])
        return buf.getvalue()


def _resample(pts, h):
    """Uniform arclength resampling on a chord-length cubic spline; end points kept."""
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    keep = np.r_[True, seg > 1e-12]
    pts = pts[keep]
    seg = seg[seg > 1e-12]
    L = float(seg.sum())
    n = max(2, int(round(L / h)))
    t = np.r_[0.0, np.cumsum(seg)]
    if len(pts) < 4:
        u = np.linspace(0.0, L, n + 1)
        return np.c_[np.interp(u, t, pts[:, 0]), np.interp(u, t, pts[:, 1])]
    sp = CubicSpline(t, pts, bc_type="not-a-knot")
    # spline arclength is close to chord length; one refinement pass evens it out
    fine = np.linspace(0.0, L, 8 * n + 1)
    P = sp(fine)
    s_len = np.r_[0.0, np.cumsum(np.linalg.norm(np.diff(P, axis=0), axis=1))]
    u = np.interp(np.linspace(0.0, s_len[-1], n + 1), s_len, fine)
    out = sp(u)
    out[0], out[-1] = pts[0], pts[-1]
    return out


def initial_state(kind, d, h=0.05, n_per_chain=None):
    """Standard starting curves.

    ``"flat-sheets"``: segments ``(-1,0)-(1,0)`` and ``(1,-d)-(-1,-d)``.
    ``"wall-chords"``: vertical chords on ``x1 = -1`` and ``x1 = 1``.
    ``"wall-chord"``: the single right chord.
    ``"cone"``: the X through ``(0, -d/2)`` joining each ring to itself.
    """
    g1l, g1r, g2l, g2r = np.array([-1.0, 0]), np.array([1.0, 0]), np.array([-1.0, -d]), np.array([1.0, -d])

    def line(a, b):
        n = n_per_chain or max(2, int(round(np.linalg.norm(b - a) / h)))
        t = np.linspace(0.0, 1.0, n + 1)[:, None]
        return a + t * (b - a)

    if kind == "flat-sheets":
        chains = [line(g1l, g1r), line(g2r, g2l)]
    elif kind == "wall-chords":
        chains = [line(g1l, g2l), line(g2r, g1r)]
    elif kind == "wall-chord":
        chains = [line(g2r, g1r)]
    elif kind == "cone":
        apex = np.array([0.0, -d / 2])
        chains = [np.vstack([line(g1l, apex), line(apex, g1r)[1:]]), np.vstack([line(g2r, apex), line(apex, g2l)[1:]])]
    else:
        raise ConfigError(f"unknown initial curve {kind!r}")
    return FlowState(tuple(chains), float(d))


def _gmax(s):
    return math.sqrt(math.pi) * special.gamma((s + 1) / 2) / (2 * special.gamma(s / 2 + 1))


def polyline_curvature(chains, Z, NU, own, params: Params):
    """Exact ``H`` of the union of ``chains`` at points ``Z`` lying on facets ``own``."""
    P = np.ascontiguousarray(np.concatenate([c[:-1] for c in chains]))
    Q = np.ascontiguousarray(np.concatenate([c[1:] for c in chains]))
    diam = float(np.ptp(np.vstack([P, Q]), axis=0).max())
    H = _kernels.polar_curvature_2d(np.ascontiguousarray(Z, dtype=float), np.ascontiguousarray(NU, dtype=float),
                                    np.asarray(own, dtype=np.int64), P, Q, params.s, _gmax(params.s), 1e-14 * diam)
    return params.cN * H


def _edge_data(chains):
    P = np.concatenate([c[:-1] for c in chains])
    Q = np.concatenate([c[1:] for c in chains])
    e = Q - P
    le = np.linalg.norm(e, axis=1)
    nu = np.stack([-e[:, 1], e[:, 0]], axis=1) / le[:, None]
    return 0.5 * (P + Q), nu, le


def _vertex_velocity(chains, params):
    """Per-chain arrays of interior vertex velocities and signed normal speeds."""
    mid, nu, le = _edge_data(chains)
    H = polyline_curvature(chains, mid, nu, np.arange(len(mid)), params)
    vel, Hv, off = [], [], 0
    for c in chains:
        m = len(c) - 1
        h, n, l = H[off:off + m], nu[off:off + m], le[off:off + m]
        off += m
        w0, w1 = l[:-1], l[1:]
        v = (w0[:, None] * h[:-1, None] * n[:-1] + w1[:, None] * h[1:, None] * n[1:]) / (w0 + w1)[:, None]
        nv = n[:-1] + n[1:]
        nv /= np.maximum(np.linalg.norm(nv, axis=1), 1e-300)[:, None]
        vel.append(v)
        Hv.append(np.einsum("ij,ij->i", v, nv))
    return vel, Hv


def _seg_dist(X, P, Q):
    """Distances from every point of X to every segment [P_j, Q_j] (len(X), len(P))."""
    e = Q - P
    ee = np.maximum(np.einsum("ij,ij->i", e, e), 1e-300)
    w = X[:, None, :] - P[None, :, :]
    t = np.clip(np.einsum("ijk,jk->ij", w, e) / ee, 0.0, 1.0)
    return np.linalg.norm(w - t[..., None] * e[None], axis=2)


def _segments_cross(a, b, c, d):
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)


def _reconnect(A, i, B, j):
    """Cut chain A at vertex i and chain B at its segment j, then rejoin the four ends."""
    A1, A2 = A[:i], A[i + 1:]
    B1, B2 = B[: j + 1], B[j + 1:]
    opts = []
    for C1, C2 in ((np.vstack([A1, B1[::-1]]), np.vstack([B2[::-1], A2])),
                   (np.vstack([A1, B2]), np.vstack([B1, A2]))):
        br1 = (C1[len(A1) - 1], C1[len(A1)])
        k = len(C2) - len(A2)
        br2 = (C2[k - 1], C2[k])
        crossing = _segments_cross(br1[0], br1[1], br2[0], br2[1])
        length = np.linalg.norm(br1[1] - br1[0]) + np.linalg.norm(br2[1] - br2[0])
        opts.append((crossing, length, C1, C2))
    opts.sort(key=lambda o: (o[0], o[1]))
    return opts[0][2], opts[0][3]


def _surgery(chains, dist, h):
    """Apply at most one merge or pinch; returns (chains, changed)."""
    # merges between distinct chains
    best = None
    for a in range(len(chains)):
        for b in range(len(chains)):
            if a == b:
                continue
            A, B = chains[a], chains[b]
            if len(A) < 3 or len(B) < 2:
                continue
            D = _seg_dist(A[1:-1], B[:-1], B[1:])
            k = np.unravel_index(np.argmin(D), D.shape)
            if D[k] < dist and (best is None or D[k] < best[0]):
                best = (float(D[k]), a, b, int(k[0]) + 1, int(k[1]))
    if best is not None:
        _, a, b, i, j = best
        C1, C2 = _reconnect(chains[a], i, chains[b], j)
        rest = [c for k, c in enumerate(chains) if k not in (a, b)]
        return rest + [c for c in (C1, C2) if len(c) >= 2], True
    # pinches within one chain: far apart along the chain, close in space
    gap = max(3, int(math.ceil(3.0 * dist / h)) + 2)
    for a, A in enumerate(chains):
        if len(A) < 2 * gap:
            continue
        D = _seg_dist(A, A[:-1], A[1:])
        idx = np.arange(len(A))
        far = np.abs(idx[:, None] - idx[None, :-1]) > gap
        far[0, :] = far[-1, :] = False
        D = np.where(far, D, np.inf)
        k = np.unravel_index(np.argmin(D), D.shape)
        if D[k] < dist:
            i, j = sorted((int(k[0]), int(k[1])))
            # keep the open part, drop the detached loop (it shrinks away under the flow)
            C = np.vstack([A[: i + 1], A[j + 1:]])
            rest = [c for kk, c in enumerate(chains) if kk != a]
            return rest + [C], True
    return chains, False


def flow_step(state: FlowState, config: FlowConfig, params: Params, spec=None, *, dt=None):
    """One explicit step: move, resample, clamp to the slab, then topology surgery.

    Raises
    ------
    StepRejected
        if some vertex would move farther than half the target spacing;
        retry with a smaller ``dt``.
    """
    if params.N != 2:
        raise ConfigError("the flow is planar")
    dt = config.dt(params.s) if dt is None else dt
    chains = [np.array(c, dtype=float) for c in state.chains]
    vel, Hv = _vertex_velocity(chains, params)
    vmax = max((float(np.abs(v).max()) for v in vel if len(v)), default=0.0)
    if vmax * dt > 0.5 * config.h_target:
        raise StepRejected(f"displacement {vmax * dt:.3e} exceeds half the spacing; halve dt")
    moved = []
    n_proj = 0
    for c, v in zip(chains, vel):
        c = c.copy()
        c[1:-1] += dt * v
        c = _resample(c, config.h_target)
        y = np.clip(c[1:-1, 1], -state.d, 0.0)
        n_proj += int(np.count_nonzero(y != c[1:-1, 1]))
        c[1:-1, 1] = y
        moved.append(c)
    n_surg = 0
    for _ in range(8):
        moved, changed = _surgery(moved, config.merge_dist, config.h_target)
        if not changed:
            break
        n_surg += 1
        moved = [_resample(c, config.h_target) for c in moved]
    return FlowState(tuple(moved), state.d, state.time + dt, state.step_count + 1,
                     tuple(np.concatenate(Hv)) if Hv else (), dt, n_proj, state.n_surgeries + n_surg)


def connectivity_report(state: FlowState):
    """Components of the polyline complex and the rings each one reaches.

    Chains sharing a point are one component. Returns ``n_components``,
    ``boundary_attachment`` (component -> sorted ring names),
    ``min_pair_distance`` between distinct components (inf for one) and
    ``chain_component``.
    """
    chains = [np.asarray(c, dtype=float) for c in state.chains]
    if not chains or sum(len(c) for c in chains) == 0:
        raise InvalidState("empty curve")
    n = len(chains)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(n):
        for b in range(a + 1, n):
            D = _seg_dist(chains[a], chains[b][:-1], chains[b][1:])
            if D.min() == 0.0:
                parent[find(b)] = find(a)
    roots = sorted({find(a) for a in range(n)})
    label = {r: k for k, r in enumerate(roots)}
    comp = [label[find(a)] for a in range(n)]
    attach = {k: set() for k in range(len(roots))}
    for name, pts in state.rings.items():
        for a, c in enumerate(chains):
            for end in (c[0], c[-1]):
                if np.any(np.all(np.abs(pts - end) <= 1e-12, axis=1)):
                    attach[comp[a]].add(name)
    gap = math.inf
    for a in range(n):
        for b in range(n):
            if comp[a] != comp[b]:
                gap = min(gap, float(_seg_dist(chains[a], chains[b][:-1], chains[b][1:]).min()))
    return {
        "n_components": len(roots),
        "boundary_attachment": {k: sorted(v) for k, v in attach.items()},
        "min_pair_distance": gap,
        "chain_component": comp,
    }


def _min_wall_gap(state):
    P = state.interior_points()
    return float((1.0 - np.abs(P[:, 0])).min()) if len(P) else math.inf


@dataclass
class FlowResult:
    """Final state, trace rows, verdict and topology transitions ``(step, before, after)``."""

    final: FlowState
    rows: list
    verdict: str
    transitions: list = field(default_factory=list)

    @property
    def trace(self):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        return buf.getvalue()


def _trace_row(state, sup_h, config, params):
    rep = connectivity_report(state)
    P = state.interior_points()
    row = {
        "step": state.step_count,
        "time": float(state.time),
        "sup_H": float(sup_h),
        "n_components": rep["n_components"],
        "min_component_gap": float(rep["min_pair_distance"]),
        "min_wall_gap": _min_wall_gap(state),
        "min_abs_x1": float(np.abs(P[:, 0]).min()) if len(P) else math.nan,
        "max_abs_x1": float(np.abs(P[:, 0]).max()) if len(P) else math.nan,
        "per_s_estimate": math.nan,
        "per_s_std_error": math.nan,
        "dt": float(state.dt) if state.dt is not None else math.nan,
        "n_projections": state.n_projections,
    }
    if config.per_s_samples:
        omega = Domain.box((-1.5, -state.d - 0.5), (1.5, 0.5))
        est = per_s_estimate(state.curve, omega, params,
                             QuadratureSpec(n_samples=config.per_s_samples, seed=config.seed))
        row["per_s_estimate"] = est.value
        row["per_s_std_error"] = est.std_error
    return row


def flow_run(initial: FlowState, config: FlowConfig, params: Params, spec=None):
    """Run :func:`flow_step` until ``sup |H| < stop_tol`` or ``max_steps``.

    ``sup |H|`` is taken over interior vertices that are at least one
    spacing away from the rings, where the curvature of a curve with
    boundary is singular. The verdict is ``"ConvergedCritical"``,
    ``"MaxSteps"`` or ``"Degenerated"`` (a chain collapsed or left the
    finite range). Rejected steps are retried with half the time step.
    """
    for c in initial.chains:
        ends = np.vstack([c[0], c[-1]])
        rings = np.vstack(list(initial.rings.values()))
        if not all(np.any(np.all(np.abs(rings - e) <= 1e-12, axis=1)) for e in ends):
            raise InvalidState("every initial chain must join two ring points")
    state = initial
    rows = []
    verdict = "MaxSteps"
    dt0 = config.dt(params.s)
    last_rep = _signature(state)
    transitions = []
    for _ in range(config.max_steps):
        dt = dt0
        for _h in range(config.max_halvings + 1):
            try:
                new = flow_step(state, config, params, spec, dt=dt)
                break
            except StepRejected:
                dt *= 0.5
        else:
            verdict = "Degenerated"
            break
        if not all(len(c) >= 2 and np.all(np.isfinite(c)) for c in new.chains):
            verdict = "Degenerated"
            state = new
            break
        sup_h = _sup_interior(new, config)
        state = new
        sig = _signature(state)
        if sig != last_rep:
            transitions.append((state.step_count, last_rep, sig))
            last_rep = sig
        converged = sup_h < config.stop_tol
        if state.step_count % config.log_every == 0 or converged:
            rows.append(_trace_row(state, sup_h, config, params))
        if converged:
            verdict = "ConvergedCritical"
            break
    if not rows or rows[-1]["step"] != state.step_count:
        rows.append(_trace_row(state, _sup_interior(state, config), config, params))
    return FlowResult(state, rows, verdict, transitions)


def _signature(state):
    """Component count and ring attachments, e.g. ``"2:G1|G2"``."""
    rep = connectivity_report(state)
    parts = sorted("+".join(n.replace("Gamma", "G") for n in v) for v in rep["boundary_attachment"].values())
    return f"{rep['n_components']}:" + "|".join(parts)


def _sup_interior(state, config):
    if not state.per_vertex_H:
        return math.inf
    H = np.asarray(state.per_vertex_H)
    # vertices of the previous configuration; use the current ones as a proxy for ring distance
    pts = np.concatenate([c[1:-1] for c in state.chains])
    if len(pts) != len(H):
        return float(np.abs(H).max())
    rings = np.vstack(list(state.rings.values()))
    far = np.min(np.linalg.norm(pts[:, None, :] - rings[None], axis=2), axis=1) > config.h_target * 1.5
    return float(np.abs(H[far]).max()) if np.any(far) else float(np.abs(H).max())


def audit_state(state: FlowState, params: Params, n_points=10, spec: QuadratureSpec = QuadratureSpec(), *,
                min_ring_dist=None):
    """Monte Carlo check of criticality at random edge midpoints of the final curve.

    Midpoints are where the flow drives ``H`` to zero; elsewhere on a
    polyline the corners contribute. Midpoints closer than
    ``min_ring_dist`` (default ``0.1 min(1, d)``) to a ring are skipped.
    Returns a list of ``(point, Estimate)`` and whether every interval
    contains 0.
    """
    M = state.curve
    if min_ring_dist is None:
        min_ring_dist = 0.1 * min(1.0, state.d)
    rng = np.random.default_rng(spec.seed)
    rings = np.vstack(list(state.rings.values()))
    mids = M.barycenters
    ok = np.min(np.linalg.norm(mids[:, None, :] - rings[None], axis=2), axis=1) > min_ring_dist
    cand = np.flatnonzero(ok)
    pick = rng.choice(cand, size=min(n_points, len(cand)), replace=False)
    out = []
    for k, f in enumerate(sorted(pick)):
        est = fmc_estimate(M, mids[f], M.facet_normals[f], params, replace(spec, seed=spec.seed + k))
        out.append((mids[f], est))
    return out, bool(out) and all(e.contains(0.0) for _, e in out)


def regime_scan(ds, params: Params, *, kind="flat-sheets", h=0.05, **config_kw):
    """Run the flow for each separation in ``ds`` and classify the outcome.

    Returns ``(rows, (d_low, d_high))`` where each row holds ``d``, the
    verdict, the final signature and the final gaps, and the interval
    brackets the change from "every component touches both rings" (joined)
    to "each component touches one ring" (separate). Entries of the
    interval are ``None`` when the scan does not bracket the change.
    """
    rows = []
    for d in sorted(float(x) for x in ds):
        cfg = FlowConfig(d=d, h_target=h, **config_kw)
        res = flow_run(initial_state(kind, d, h), cfg, params)
        rep = connectivity_report(res.final)
        att = list(rep["boundary_attachment"].values())
        if all(len(a) == 2 for a in att):
            regime = "joined"
        elif all(len(a) == 1 for a in att):
            regime = "separate"
        else:
            regime = "mixed"
        last = res.rows[-1]
        rows.append({"d": d, "verdict": res.verdict, "steps": res.final.step_count,
                     "signature": _signature(res.final), "regime": regime,
                     "min_component_gap": last["min_component_gap"], "min_wall_gap": last["min_wall_gap"]})
    joined = [r["d"] for r in rows if r["regime"] == "joined"]
    sep = [r["d"] for r in rows if r["regime"] == "separate"]
    lo = max(joined) if joined else None
    hi = min((d for d in sep if lo is None or d > lo), default=None)
    return rows, (lo, hi)
