"""JIT-compiled inner loops shared by the geometry, folding and planning code.

Everything here works on raw float64 arrays; the public wrappers live in
:mod:`interlock.geom` and :mod:`interlock.linkage`.
"""

import numpy as np
from numba import njit

ACCEPTED = 0
PROJECTION_FAILED = 1
SELF_INTERSECTION = 2
INTER_CHAIN_COLLISION = 3

MISSES = 0
PIERCES = 1
DEGENERATE = 2


@njit(cache=True)
def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit(cache=True)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True, inline="always")
def _clamp01s(t):
    if t < 0.0:
        return 0.0
    if t > 1.0:
        return 1.0
    return t


@njit(cache=True, inline="always")
def _psd(px, py, pz, ax, ay, az, bx, by, bz):
    abx = bx - ax
    aby = by - ay
    abz = bz - az
    denom = abx * abx + aby * aby + abz * abz
    t = 0.0
    if denom > 0.0:
        t = _clamp01s(((px - ax) * abx + (py - ay) * aby + (pz - az) * abz) / denom)
    dx = px - (ax + t * abx)
    dy = py - (ay + t * aby)
    dz = pz - (az + t * abz)
    return np.sqrt(dx * dx + dy * dy + dz * dz)


@njit(cache=True)
def _ssd(p1x, p1y, p1z, q1x, q1y, q1z, p2x, p2y, p2z, q2x, q2y, q2z):
    # closest points of two segments, Ericson ch. 5.1.9
    d1x = q1x - p1x
    d1y = q1y - p1y
    d1z = q1z - p1z
    d2x = q2x - p2x
    d2y = q2y - p2y
    d2z = q2z - p2z
    rx = p1x - p2x
    ry = p1y - p2y
    rz = p1z - p2z
    a = d1x * d1x + d1y * d1y + d1z * d1z
    e = d2x * d2x + d2y * d2y + d2z * d2z
    f = d2x * rx + d2y * ry + d2z * rz
    c = d1x * rx + d1y * ry + d1z * rz
    b = d1x * d2x + d1y * d2y + d1z * d2z
    denom = a * e - b * b
    parallel = denom <= 1e-14 * a * e
    s = 0.0
    if not parallel:
        s = _clamp01s((b * f - c * e) / denom)
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = _clamp01s(-c / a)
    elif t > 1.0:
        t = 1.0
        s = _clamp01s((b - c) / a)
    dx = (p1x + s * d1x) - (p2x + t * d2x)
    dy = (p1y + s * d1y) - (p2y + t * d2y)
    dz = (p1z + s * d1z) - (p2z + t * d2z)
    dist = np.sqrt(dx * dx + dy * dy + dz * dz)
    if parallel:
        # the endpoint projections cover every candidate
        dist = min(dist, _psd(p1x, p1y, p1z, p2x, p2y, p2z, q2x, q2y, q2z))
        dist = min(dist, _psd(q1x, q1y, q1z, p2x, p2y, p2z, q2x, q2y, q2z))
        dist = min(dist, _psd(p2x, p2y, p2z, p1x, p1y, p1z, q1x, q1y, q1z))
        dist = min(dist, _psd(q2x, q2y, q2z, p1x, p1y, p1z, q1x, q1y, q1z))
    return dist


@njit(cache=True)
def point_seg_dist(p, a, b):
    return _psd(p[0], p[1], p[2], a[0], a[1], a[2], b[0], b[1], b[2])


@njit(cache=True)
def seg_seg_dist(p1, q1, p2, q2):
    return _ssd(p1[0], p1[1], p1[2], q1[0], q1[1], q1[2],
                p2[0], p2[1], p2[2], q2[0], q2[1], q2[2])


@njit(cache=True)
def _link_dist(X, i1, j1, i2, j2):
    return _ssd(X[i1, 0], X[i1, 1], X[i1, 2], X[j1, 0], X[j1, 1], X[j1, 2],
                X[i2, 0], X[i2, 1], X[i2, 2], X[j2, 0], X[j2, 1], X[j2, 2])


@njit(cache=True)
def seg_tri_pierce(p, q, a, b, c, tol):
    """Return (code, margin) for segment pq against triangle abc.

    margin is positive exactly when the segment crosses the open interior:
    it is the smaller of the endpoints' distances to the plane and the
    crossing point's in-plane distance to the nearest triangle edge.
    """
    n = _cross(b - a, c - a)
    nn = np.sqrt(_dot(n, n))
    n = n / nn
    d0 = _dot(p - a, n)
    d1 = _dot(q - a, n)
    if abs(d0) <= tol and abs(d1) <= tol:
        return DEGENERATE, -max(abs(d0), abs(d1))
    if d1 == d0:
        return MISSES, -min(abs(d0), abs(d1))
    sigma = 1.0 if d1 > d0 else -1.0
    side = min(-d0 * sigma, d1 * sigma)
    t = d0 / (d0 - d1)
    x = p + t * (q - p)
    edge = 1e300
    verts = (a, b, c)
    for i in range(3):
        u = verts[i]
        w = verts[(i + 1) % 3]
        # inward edge normal within the triangle's plane
        en = _cross(n, w - u)
        en = en / np.sqrt(_dot(en, en))
        sd = _dot(x - u, en)
        if sd < edge:
            edge = sd
    margin = min(side, edge)
    if side > tol and edge > tol:
        return PIERCES, margin
    return MISSES, margin


@njit(cache=True)
def tet_signed_dist(p, v0, v1, v2, v3):
    """Largest signed distance of p to the outward face planes (<0 inside)."""
    verts = (v0, v1, v2, v3)
    best = -1e300
    for i in range(4):
        a = verts[(i + 1) % 4]
        b = verts[(i + 2) % 4]
        c = verts[(i + 3) % 4]
        o = verts[i]
        n = _cross(b - a, c - a)
        n = n / np.sqrt(_dot(n, n))
        if _dot(o - a, n) > 0.0:
            n = -n
        sd = _dot(p - a, n)
        if sd > best:
            best = sd
    return best


@njit(cache=True)
def max_rel_length_error(X, li, lj, rest):
    worst = 0.0
    for k in range(li.shape[0]):
        i = li[k]
        j = lj[k]
        dx = X[j, 0] - X[i, 0]
        dy = X[j, 1] - X[i, 1]
        dz = X[j, 2] - X[i, 2]
        err = abs(np.sqrt(dx * dx + dy * dy + dz * dz) - rest[k]) / rest[k]
        if err > worst:
            worst = err
    return worst


@njit(cache=True)
def project_lengths(X, li, lj, rest, invm, len_tol, max_sweeps):
    """Cyclic midpoint projection in place; returns the sweeps used or -1.

    Sweeps alternate forward and backward over the links.
    """
    m = li.shape[0]
    for sweep in range(max_sweeps + 1):
        if max_rel_length_error(X, li, lj, rest) < len_tol:
            return sweep
        if sweep == max_sweeps:
            break
        for kk in range(m):
            k = kk if sweep % 2 == 0 else m - 1 - kk
            i = li[k]
            j = lj[k]
            wsum = invm[i] + invm[j]
            if wsum == 0.0:
                continue
            dx = X[j, 0] - X[i, 0]
            dy = X[j, 1] - X[i, 1]
            dz = X[j, 2] - X[i, 2]
            length = np.sqrt(dx * dx + dy * dy + dz * dz)
            f = (length - rest[k]) / (wsum * length)
            wi = invm[i] * f
            wj = invm[j] * f
            X[i, 0] += wi * dx
            X[i, 1] += wi * dy
            X[i, 2] += wi * dz
            X[j, 0] -= wj * dx
            X[j, 1] -= wj * dy
            X[j, 2] -= wj * dz
    return -1


@njit(cache=True)
def adjacent_overlap_dist(X, i, j, k):
    # links (i, j) and (j, k) may only share j
    d1 = _psd(X[k, 0], X[k, 1], X[k, 2], X[i, 0], X[i, 1], X[i, 2], X[j, 0], X[j, 1], X[j, 2])
    d2 = _psd(X[i, 0], X[i, 1], X[i, 2], X[j, 0], X[j, 1], X[j, 2], X[k, 0], X[k, 1], X[k, 2])
    return min(d1, d2)


@njit(cache=True)
def self_min_dist(X, li, lj, link_chain):
    """Minimum over same-chain link pairs (non-adjacent distance, adjacent overlap)."""
    best = 1e300
    m = li.shape[0]
    for a in range(m):
        for b in range(a + 1, m):
            if link_chain[a] != link_chain[b]:
                continue
            if lj[a] == li[b]:
                d = adjacent_overlap_dist(X, li[a], lj[a], lj[b])
            elif lj[b] == li[a]:
                d = adjacent_overlap_dist(X, li[b], lj[b], lj[a])
            else:
                d = _link_dist(X, li[a], lj[a], li[b], lj[b])
            if d < best:
                best = d
    return best


@njit(cache=True)
def inter_min_dist(X, li, lj, link_chain, c1, c2):
    best = 1e300
    m = li.shape[0]
    for a in range(m):
        if link_chain[a] != c1:
            continue
        for b in range(m):
            if link_chain[b] != c2:
                continue
            d = _link_dist(X, li[a], lj[a], li[b], lj[b])
            if d < best:
                best = d
    return best


@njit(cache=True)
def all_inter_min_dist(X, li, lj, link_chain):
    best = 1e300
    m = li.shape[0]
    for a in range(m):
        for b in range(a + 1, m):
            if link_chain[a] == link_chain[b]:
                continue
            d = _link_dist(X, li[a], lj[a], li[b], lj[b])
            if d < best:
                best = d
    return best


@njit(cache=True)
def fold(X, k, disp, li, lj, rest, invm, link_chain, len_tol, max_sweeps, clearance):
    """One all-or-nothing fold step; returns (code, new coordinates)."""
    Y = X.copy()
    Y[k] += disp
    if project_lengths(Y, li, lj, rest, invm, len_tol, max_sweeps) < 0:
        return PROJECTION_FAILED, Y
    if self_min_dist(Y, li, lj, link_chain) < clearance:
        return SELF_INTERSECTION, Y
    if all_inter_min_dist(Y, li, lj, link_chain) < clearance:
        return INTER_CHAIN_COLLISION, Y
    return ACCEPTED, Y


@njit(cache=True)
def translation_clear(X, li, lj, link_chain, mover, direction, n_samples, clearance):
    """True iff translating chain `mover` along direction stays >= clearance."""
    m = li.shape[0]
    for s in range(n_samples + 1):
        f = s / n_samples
        for a in range(m):
            if link_chain[a] != mover:
                continue
            p = X[li[a]] + f * direction
            q = X[lj[a]] + f * direction
            for b in range(m):
                if link_chain[b] == mover:
                    continue
                if seg_seg_dist(p, q, X[li[b]].copy(), X[lj[b]].copy()) < clearance:
                    return False
    return True


@njit(cache=True)
def _point_tri_dist_inside(p, a, b, c):
    """Distance from p to the plane of abc if p projects inside abc, else +inf."""
    n = _cross(b - a, c - a)
    nn = np.sqrt(_dot(n, n))
    if nn == 0.0:
        return 1e300
    n = n / nn
    d = _dot(p - a, n)
    x = p - d * n
    verts = (a, b, c)
    for i in range(3):
        u = verts[i]
        w = verts[(i + 1) % 3]
        if _dot(_cross(w - u, x - u), n) < 0.0:
            return 1e300
    return abs(d)


@njit(cache=True)
def _seg_crosses_tri(p, q, a, b, c):
    n = _cross(b - a, c - a)
    d0 = _dot(p - a, n)
    d1 = _dot(q - a, n)
    if d0 * d1 > 0.0 or d0 == d1:
        return False
    x = p + (d0 / (d0 - d1)) * (q - p)
    verts = (a, b, c)
    for i in range(3):
        u = verts[i]
        w = verts[(i + 1) % 3]
        if _dot(_cross(w - u, x - u), n) < 0.0:
            return False
    return True


@njit(cache=True)
def swept_seg_dist(p, q, T, s0, s1):
    """Distance from segment s0s1 to the region swept by segment pq translated by T."""
    c0 = p
    c1 = q
    c2 = q + T
    c3 = p + T
    if _seg_crosses_tri(s0, s1, c0, c1, c2) or _seg_crosses_tri(s0, s1, c0, c2, c3):
        return 0.0
    best = seg_seg_dist(s0, s1, c0, c1)
    best = min(best, seg_seg_dist(s0, s1, c1, c2))
    best = min(best, seg_seg_dist(s0, s1, c2, c3))
    best = min(best, seg_seg_dist(s0, s1, c3, c0))
    for e in (s0, s1):
        best = min(best, _point_tri_dist_inside(e, c0, c1, c2))
        best = min(best, _point_tri_dist_inside(e, c0, c2, c3))
    return best


@njit(cache=True)
def sweep_clear(X, li, lj, link_chain, mover, direction, clearance):
    """True iff the continuous translation of chain `mover` by direction stays >= clearance."""
    m = li.shape[0]
    for a in range(m):
        if link_chain[a] != mover:
            continue
        p = X[li[a]].copy()
        q = X[lj[a]].copy()
        for b in range(m):
            if link_chain[b] == mover:
                continue
            if swept_seg_dist(p, q, direction, X[li[b]].copy(), X[lj[b]].copy()) < clearance:
                return False
    return True
