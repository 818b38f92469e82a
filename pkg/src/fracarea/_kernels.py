"""Compiled inner loops: segment/facet crossing counts and polyline checks.

Everything here works on plain float64/int64 arrays so that numba can
compile it; the public wrappers live in :mod:`fracarea.geometry`.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def crossings_2d(A, B, P, Q, fbox, tol, tol_ang, skip_start):
    """Count transversal crossings of segments [A[i], B[i]] with facets [P[f], Q[f]].

    Returns ``(counts, flags)``. A flag marks a query whose parity cannot be
    trusted (near-vertex hit, near-tangency, endpoint on a facet, collinear
    overlap). With ``skip_start`` an intersection at the start point A[i]
    is ignored instead of flagged.
    """
    n = A.shape[0]
    nf = P.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    flags = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        ax = A[i, 0]
        ay = A[i, 1]
        dx = B[i, 0] - ax
        dy = B[i, 1] - ay
        L = np.sqrt(dx * dx + dy * dy)
        if L == 0.0:
            continue
        xmin = min(ax, B[i, 0]) - tol
        xmax = max(ax, B[i, 0]) + tol
        ymin = min(ay, B[i, 1]) - tol
        ymax = max(ay, B[i, 1]) + tol
        c = 0
        bad = False
        for f in range(nf):
            if fbox[f, 1] < xmin or fbox[f, 0] > xmax or fbox[f, 3] < ymin or fbox[f, 2] > ymax:
                continue
            px = P[f, 0]
            py = P[f, 1]
            ex = Q[f, 0] - px
            ey = Q[f, 1] - py
            le = np.sqrt(ex * ex + ey * ey)
            denom = dx * ey - dy * ex
            wx = px - ax
            wy = py - ay
            if abs(denom) <= 1e-3 * tol_ang * L * le:
                # parallel; only a collinear overlap matters
                if abs(wx * dy - wy * dx) / L < tol:
                    s0 = (wx * dx + wy * dy) / L
                    s1 = ((Q[f, 0] - ax) * dx + (Q[f, 1] - ay) * dy) / L
                    lo = min(s0, s1)
                    hi = max(s0, s1)
                    start = tol if skip_start else -tol
                    if hi > start and lo <= L + tol:
                        bad = True
                continue
            t = (wx * ey - wy * ex) / denom
            u = (wx * dy - wy * dx) / denom
            if t * L < -tol or (1.0 - t) * L < -tol:
                continue
            if u * le < -tol or (1.0 - u) * le < -tol:
                continue
            if skip_start and t * L < tol:
                continue
            if t * L < tol or (1.0 - t) * L < tol:
                bad = True
                continue
            if u * le < tol or (1.0 - u) * le < tol:
                bad = True
                continue
            if abs(denom) < tol_ang * L * le:
                bad = True
                continue
            c += 1
        counts[i] = c
        flags[i] = bad
    return counts, flags


@njit(cache=True)
def crossings_3d(A, B, V0, E1, E2, fbox, btol, tol, tol_ang, skip_start):
    """Segment/triangle crossing counts (Moller-Trumbore with tolerance bands).

    ``btol[f]`` is the barycentric width corresponding to the absolute
    length ``tol`` on facet ``f``.
    """
    n = A.shape[0]
    nf = V0.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    flags = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        a0 = A[i, 0]
        a1 = A[i, 1]
        a2 = A[i, 2]
        d0 = B[i, 0] - a0
        d1 = B[i, 1] - a1
        d2 = B[i, 2] - a2
        L = np.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
        if L == 0.0:
            continue
        lo0 = min(a0, B[i, 0]) - tol
        hi0 = max(a0, B[i, 0]) + tol
        lo1 = min(a1, B[i, 1]) - tol
        hi1 = max(a1, B[i, 1]) + tol
        lo2 = min(a2, B[i, 2]) - tol
        hi2 = max(a2, B[i, 2]) + tol
        c = 0
        bad = False
        for f in range(nf):
            if (fbox[f, 1] < lo0 or fbox[f, 0] > hi0 or fbox[f, 3] < lo1
                    or fbox[f, 2] > hi1 or fbox[f, 5] < lo2 or fbox[f, 4] > hi2):
                continue
            e10 = E1[f, 0]
            e11 = E1[f, 1]
            e12 = E1[f, 2]
            e20 = E2[f, 0]
            e21 = E2[f, 1]
            e22 = E2[f, 2]
            # facet normal (unnormalised)
            n0 = e11 * e22 - e12 * e21
            n1 = e12 * e20 - e10 * e22
            n2 = e10 * e21 - e11 * e20
            nn = np.sqrt(n0 * n0 + n1 * n1 + n2 * n2)
            p0 = d1 * e22 - d2 * e21
            p1 = d2 * e20 - d0 * e22
            p2 = d0 * e21 - d1 * e20
            det = e10 * p0 + e11 * p1 + e12 * p2
            t0 = a0 - V0[f, 0]
            t1 = a1 - V0[f, 1]
            t2 = a2 - V0[f, 2]
            if abs(det) <= 1e-3 * tol_ang * L * nn:
                ha = (t0 * n0 + t1 * n1 + t2 * n2) / nn
                if abs(ha) < tol:
                    if not skip_start:
                        bad = True
                    else:
                        hb = ((B[i, 0] - V0[f, 0]) * n0 + (B[i, 1] - V0[f, 1]) * n1
                              + (B[i, 2] - V0[f, 2]) * n2) / nn
                        if abs(hb) < tol:
                            bad = True
                continue
            inv = 1.0 / det
            u = (t0 * p0 + t1 * p1 + t2 * p2) * inv
            q0 = t1 * e12 - t2 * e11
            q1 = t2 * e10 - t0 * e12
            q2 = t0 * e11 - t1 * e10
            v = (d0 * q0 + d1 * q1 + d2 * q2) * inv
            t = (e20 * q0 + e21 * q1 + e22 * q2) * inv
            bt = btol[f]
            if u < -bt or v < -bt or u + v > 1.0 + bt:
                continue
            if t * L < -tol or (1.0 - t) * L < -tol:
                continue
            if skip_start and t * L < tol:
                continue
            if t * L < tol or (1.0 - t) * L < tol:
                bad = True
                continue
            if u < bt or v < bt or 1.0 - u - v < bt:
                bad = True
                continue
            if abs(det) < tol_ang * L * nn:
                bad = True
                continue
            c += 1
        counts[i] = c
        flags[i] = bad
    return counts, flags


@njit(cache=True)
def first_polyline_crossing(V, S, tol):
    """Return the first pair of non-adjacent segments that touch, or (-1, -1)."""
    nf = S.shape[0]
    for i in range(nf):
        a = S[i, 0]
        b = S[i, 1]
        ax = V[a, 0]
        ay = V[a, 1]
        bx = V[b, 0]
        by = V[b, 1]
        for j in range(i + 1, nf):
            c = S[j, 0]
            d = S[j, 1]
            if c == a or c == b or d == a or d == b:
                continue
            cx = V[c, 0]
            cy = V[c, 1]
            dx = V[d, 0]
            dy = V[d, 1]
            if (max(ax, bx) + tol < min(cx, dx) or max(cx, dx) + tol < min(ax, bx)
                    or max(ay, by) + tol < min(cy, dy) or max(cy, dy) + tol < min(ay, by)):
                continue
            o1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            o2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
            o3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
            o4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
            if o1 * o2 <= 0.0 and o3 * o4 <= 0.0:
                if o1 == 0.0 and o2 == 0.0:
                    # collinear: require projected overlap
                    ux = bx - ax
                    uy = by - ay
                    s0 = (cx - ax) * ux + (cy - ay) * uy
                    s1 = (dx - ax) * ux + (dy - ay) * uy
                    ll = ux * ux + uy * uy
                    if max(s0, s1) < 0.0 or min(s0, s1) > ll:
                        continue
                return i, j
    return -1, -1


@njit(cache=True)
def _int_cos_pow(psi, s, gmax):
    """Integral of cos(u)^s over [0, psi] for |psi| <= pi/2 (odd in psi)."""
    a = abs(psi)
    if a <= 0.7853981633974483:
        # expand (1 - x^2)^((s-1)/2) in x = sin(u)
        x = np.sin(a)
        x2 = x * x
        al = 0.5 * (s - 1.0)
        c = 1.0
        p = x
        out = 0.0
        for k in range(80):
            term = c * p / (2 * k + 1)
            out += term
            if abs(term) <= 1e-17 * out:
                break
            c *= (k - al) / (k + 1)
            p *= x2
        val = out
    else:
        # distance from pi/2, expanded in v = cos(u): v^s (1 - v^2)^(-1/2)
        v = np.cos(a)
        v2 = v * v
        c = 1.0
        p = v ** (s + 1.0)
        out = 0.0
        for k in range(80):
            term = c * p / (s + 1.0 + 2 * k)
            out += term
            if term <= 1e-17 * out:
                break
            c *= (k + 0.5) / (k + 1)
            p *= v2
        val = gmax - out
    return val if psi >= 0 else -val


@njit(cache=True)
def _wrap(a):
    while a > np.pi:
        a -= 2.0 * np.pi
    while a <= -np.pi:
        a += 2.0 * np.pi
    return a


@njit(cache=True)
def polar_curvature_2d_direct(Z, NU, own, P, Q, s, gmax, tiny):
    """Exact fractional mean curvature (without cN) of a polyline at points ``Z``.

    Along each ray from z the label starts at +1 below the tangent line
    (-1 above) and flips at every crossing, which gives::

        H(z) = -(2/s) int dtheta g0(theta) sum_j (-1)^(j-1) r_j(theta)^(-s)

    The angle range is cut at every vertex direction and at the tangent
    directions; inside such a sector the ordered list of crossed facets is
    fixed and each facet contributes ``|c|^-s int cos^s`` in closed form,
    with ``c`` the distance from z to the facet's line.
    """
    nz = Z.shape[0]
    nf = P.shape[0]
    out = np.zeros(nz)
    ang = np.empty(2 * nf + 3)
    cf = np.empty(nf)
    phif = np.empty(nf)
    hit_r = np.empty(nf)
    hit_f = np.empty(nf, dtype=np.int64)
    for iz in range(nz):
        zx = Z[iz, 0]
        zy = Z[iz, 1]
        nx = NU[iz, 0]
        ny = NU[iz, 1]
        m = 0
        for f in range(nf):
            ex = Q[f, 0] - P[f, 0]
            ey = Q[f, 1] - P[f, 1]
            le = np.sqrt(ex * ex + ey * ey)
            # unit normal of the facet line and signed offset of z
            ux = -ey / le
            uy = ex / le
            c = (P[f, 0] - zx) * ux + (P[f, 1] - zy) * uy
            cf[f] = c
            phif[f] = np.arctan2(c * uy, c * ux)
            for (vx, vy) in ((P[f, 0], P[f, 1]), (Q[f, 0], Q[f, 1])):
                dx = vx - zx
                dy = vy - zy
                if dx * dx + dy * dy > tiny * tiny:
                    ang[m] = np.arctan2(dy, dx)
                    m += 1
        t = np.arctan2(ny, nx)
        ang[m] = _wrap(t + 0.5 * np.pi)
        ang[m + 1] = _wrap(t - 0.5 * np.pi)
        m += 2
        a = np.sort(ang[:m])
        total = 0.0
        for k in range(m):
            b0 = a[k]
            b1 = a[k + 1] if k + 1 < m else a[0] + 2.0 * np.pi
            if b1 - b0 <= 1e-15:
                continue
            mid = 0.5 * (b0 + b1)
            dx = np.cos(mid)
            dy = np.sin(mid)
            g0 = 1.0 if dx * nx + dy * ny < 0.0 else -1.0
            nh = 0
            for f in range(nf):
                if f == own[iz] or abs(cf[f]) <= tiny:
                    continue
                ax = P[f, 0] - zx
                ay = P[f, 1] - zy
                bx = Q[f, 0] - zx
                by = Q[f, 1] - zy
                ca = dx * ay - dy * ax
                cb = dx * by - dy * bx
                if (ca > 0.0) == (cb > 0.0):
                    continue
                ex = bx - ax
                ey = by - ay
                den = dx * ey - dy * ex
                r = (ax * ey - ay * ex) / den
                if r <= 0.0:
                    continue
                # insertion by distance
                j = nh
                while j > 0 and hit_r[j - 1] > r:
                    hit_r[j] = hit_r[j - 1]
                    hit_f[j] = hit_f[j - 1]
                    j -= 1
                hit_r[j] = r
                hit_f[j] = f
                nh += 1
            sgn = g0
            for j in range(nh):
                f = hit_f[j]
                p0 = _wrap(b0 - phif[f])
                p1 = _wrap(b1 - phif[f])
                dG = _int_cos_pow(p1, s, gmax) - _int_cos_pow(p0, s, gmax)
                total += sgn * abs(cf[f]) ** (-s) * dG
                sgn = -sgn
        out[iz] = -2.0 / s * total
    return out


@njit(cache=True)
def polar_curvature_2d(Z, NU, own, P, Q, s, gmax, tiny):
    """Same sum as :func:`polar_curvature_2d_direct`, organised as an angular sweep.

    Each facet subtends an arc of less than pi seen from z; only the
    sectors whose midline lies in that arc can be crossed by it, so every
    sector visits its own short candidate list instead of all facets.
    """
    nz = Z.shape[0]
    nf = P.shape[0]
    out = np.zeros(nz)
    ang = np.empty(2 * nf + 3)
    cf = np.empty(nf)
    phif = np.empty(nf)
    st = np.empty(nf)
    ext = np.empty(nf)
    twopi = 2.0 * np.pi
    for iz in range(nz):
        zx = Z[iz, 0]
        zy = Z[iz, 1]
        nx = NU[iz, 0]
        ny = NU[iz, 1]
        m = 0
        for f in range(nf):
            ex = Q[f, 0] - P[f, 0]
            ey = Q[f, 1] - P[f, 1]
            le = np.sqrt(ex * ex + ey * ey)
            ux = -ey / le
            uy = ex / le
            c = (P[f, 0] - zx) * ux + (P[f, 1] - zy) * uy
            cf[f] = c
            phif[f] = np.arctan2(c * uy, c * ux)
            ta = np.arctan2(P[f, 1] - zy, P[f, 0] - zx)
            tb = np.arctan2(Q[f, 1] - zy, Q[f, 0] - zx)
            dl = _wrap(tb - ta)
            st[f] = ta if dl > 0.0 else tb
            ext[f] = abs(dl)
            for (vx, vy) in ((P[f, 0], P[f, 1]), (Q[f, 0], Q[f, 1])):
                dx = vx - zx
                dy = vy - zy
                if dx * dx + dy * dy > tiny * tiny:
                    ang[m] = np.arctan2(dy, dx)
                    m += 1
        t = np.arctan2(ny, nx)
        ang[m] = _wrap(t + 0.5 * np.pi)
        ang[m + 1] = _wrap(t - 0.5 * np.pi)
        m += 2
        a = np.sort(ang[:m])
        mids = np.empty(2 * m)
        for k in range(m):
            b1 = a[k + 1] if k + 1 < m else a[0] + twopi
            mids[k] = 0.5 * (a[k] + b1)
            mids[k + m] = mids[k] + twopi
        # candidate lists per sector (CSR layout)
        lo = np.empty(nf, dtype=np.int64)
        hi = np.empty(nf, dtype=np.int64)
        cnt = np.zeros(m + 1, dtype=np.int64)
        for f in range(nf):
            lo[f] = 0
            hi[f] = 0
            if f == own[iz] or abs(cf[f]) <= tiny:
                continue
            s0 = st[f]
            while s0 < a[0]:
                s0 += twopi
            while s0 >= a[0] + twopi:
                s0 -= twopi
            # widen slightly; the exact crossing test below decides
            lo[f] = np.searchsorted(mids, s0 - 1e-12)
            hi[f] = np.searchsorted(mids, s0 + ext[f] + 1e-12)
            for k in range(lo[f], hi[f]):
                cnt[k % m + 1] += 1
        for k in range(m):
            cnt[k + 1] += cnt[k]
        fill = cnt[:m].copy()
        cand = np.empty(cnt[m], dtype=np.int64)
        for f in range(nf):
            for k in range(lo[f], hi[f]):
                kk = k % m
                cand[fill[kk]] = f
                fill[kk] += 1
        hit_r = np.empty(nf)
        hit_f = np.empty(nf, dtype=np.int64)
        total = 0.0
        for k in range(m):
            b0 = a[k]
            b1 = a[k + 1] if k + 1 < m else a[0] + twopi
            if b1 - b0 <= 1e-15:
                continue
            mid = mids[k]
            dx = np.cos(mid)
            dy = np.sin(mid)
            g0 = 1.0 if dx * nx + dy * ny < 0.0 else -1.0
            nh = 0
            for q in range(cnt[k], cnt[k + 1]):
                f = cand[q]
                ax = P[f, 0] - zx
                ay = P[f, 1] - zy
                bx = Q[f, 0] - zx
                by = Q[f, 1] - zy
                ca = dx * ay - dy * ax
                cb = dx * by - dy * bx
                if (ca > 0.0) == (cb > 0.0):
                    continue
                ex = bx - ax
                ey = by - ay
                den = dx * ey - dy * ex
                r = (ax * ey - ay * ex) / den
                if r <= 0.0:
                    continue
                j = nh
                while j > 0 and hit_r[j - 1] > r:
                    hit_r[j] = hit_r[j - 1]
                    hit_f[j] = hit_f[j - 1]
                    j -= 1
                hit_r[j] = r
                hit_f[j] = f
                nh += 1
            sgn = g0
            for j in range(nh):
                f = hit_f[j]
                p0 = _wrap(b0 - phif[f])
                p1 = _wrap(b1 - phif[f])
                dG = _int_cos_pow(p1, s, gmax) - _int_cos_pow(p0, s, gmax)
                total += sgn * abs(cf[f]) ** (-s) * dG
                sgn = -sgn
        out[iz] = -2.0 / s * total
    return out
