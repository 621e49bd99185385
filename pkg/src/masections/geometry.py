"""Convex geometry primitives: polygons, ellipsoids, hulls, and John-type fits.

All bodies live in the plane. Polygons are stored as counter-clockwise,
strictly convex vertex lists; ellipsoids as a center plus a symmetric
positive-definite shape matrix M, so that E = {x : (x-c)^T M (x-c) <= 1}.
Tolerances are relative to the body diameter unless stated otherwise.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInput, EmptyIntersection, NoConvergence, ZeroArea

# Relative tolerance used for convexity / containment decisions.
REL_TOL = 1e-12

# Angular resolution used when sampling ellipsoid boundaries for containment
# tests (radians); fine enough that arc sampling error stays below 1e-3.
_BOUNDARY_SAMPLES = 8192

_MVEE_MAX_ITER = 100_000


class Polytope:
    """Convex polygon with counter-clockwise, strictly convex vertices.

    Parameters
    ----------
    vertices : (n, 2) array_like
        Vertex coordinates in counter-clockwise order. Consecutive collinear
        or duplicate vertices are rejected.
    """

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise DegenerateInput("polytope needs at least 3 planar vertices")
        diam = _point_set_diameter(v)
        if diam <= 0.0:
            raise DegenerateInput("all vertices coincide")
        tol = REL_TOL * diam
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross <= tol * diam):
            raise DegenerateInput("vertices are not strictly convex in CCW order")
        self.vertices = v
        self._diameter = diam
        # Outward edge normals and offsets: inside <=> n.x <= b for all edges.
        lengths = np.hypot(e[:, 0], e[:, 1])
        self._normals = np.column_stack([e[:, 1], -e[:, 0]]) / lengths[:, None]
        self._offsets = np.einsum("ij,ij->i", self._normals, v)

    def __len__(self):
        return len(self.vertices)

    @property
    def diameter(self):
        return self._diameter

    def contains(self, points, tol=None):
        """Vectorized membership test, inclusive up to ``tol`` (absolute)."""
        if tol is None:
            tol = REL_TOL * self._diameter
        p = np.atleast_2d(np.asarray(points, dtype=float))
        slack = p @ self._normals.T - self._offsets
        return np.all(slack <= tol, axis=1)

    def support(self, directions):
        """Support function h(d) = max_v d.v over the vertices."""
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        return (d @ self.vertices.T).max(axis=1)

    def boundary_points(self, n):
        """``n`` points equispaced by arclength along the boundary."""
        v = self.vertices
        seg = np.roll(v, -1, axis=0) - v
        lens = np.hypot(seg[:, 0], seg[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(lens)])
        s = np.linspace(0.0, cum[-1], n, endpoint=False)
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(v) - 1)
        local = (s - cum[idx]) / lens[idx]
        return v[idx] + seg[idx] * local[:, None]


class Ellipsoid:
    """Ellipsoid {x : (x-c)^T M (x-c) <= 1} with SPD shape matrix M."""

    def __init__(self, center, shape):
        c = np.asarray(center, dtype=float).reshape(2)
        m = np.asarray(shape, dtype=float).reshape(2, 2)
        if not np.allclose(m, m.T, rtol=1e-10, atol=1e-14 * max(1.0, abs(m).max())):
            raise DegenerateInput("shape matrix must be symmetric")
        w = np.linalg.eigvalsh(m)
        if w[0] <= 0.0:
            raise DegenerateInput("shape matrix must be positive definite")
        self.center = c
        self.shape = 0.5 * (m + m.T)

    @property
    def volume(self):
        return np.pi / np.sqrt(np.linalg.det(self.shape))

    def gauge(self, points):
        """Squared Minkowski gauge (x-c)^T M (x-c) about the center."""
        p = np.atleast_2d(np.asarray(points, dtype=float)) - self.center
        return np.einsum("ij,jk,ik->i", p, self.shape, p)

    def semi_axes(self):
        """Return (lengths, axes): semi-axis lengths (ascending gauge eigenvalue
        order, i.e. longest first) and unit axis directions as columns."""
        w, vec = np.linalg.eigh(self.shape)
        lengths = 1.0 / np.sqrt(w)
        return lengths, vec

    def boundary_points(self, n=_BOUNDARY_SAMPLES):
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        w, vec = np.linalg.eigh(self.shape)
        radii = 1.0 / np.sqrt(w)
        circ = np.column_stack([np.cos(t), np.sin(t)])
        return self.center + (circ * radii) @ vec.T

    def scaled(self, t):
        """Dilation by factor t about the center."""
        return Ellipsoid(self.center, self.shape / (t * t))


def convex_hull(points):
    """Convex hull via Andrew's monotone chain.

    Parameters
    ----------
    points : (n, 2) array_like

    Returns
    -------
    Polytope
        Hull vertices in counter-clockwise order, collinear points dropped.

    Raises
    ------
    DegenerateInput
        If fewer than 3 distinct points remain or all points are collinear.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateInput("expected an (n, 2) point array")
    pts = np.unique(pts, axis=0)
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 distinct points")
    diam = _point_set_diameter(pts)
    tol = REL_TOL * diam * diam
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= tol:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise DegenerateInput("points are collinear")
    return Polytope(hull)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _point_set_diameter(pts):
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    return float(np.hypot(*(hi - lo)))


def area(poly):
    """Shoelace area of a Polytope (positive for CCW order)."""
    v = poly.vertices
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def centroid(poly):
    """Area centroid of a Polytope.

    Raises
    ------
    ZeroArea
        If the area is below tolerance relative to diameter^2.
    """
    v = poly.vertices
    a = area(poly)
    if a <= REL_TOL * poly.diameter**2:
        raise ZeroArea("polygon area below tolerance")
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    w = x * yn - xn * y
    cx = float(np.sum((x + xn) * w) / (6.0 * a))
    cy = float(np.sum((y + yn) * w) / (6.0 * a))
    return np.array([cx, cy])


def mvee(points, eps=1e-6):
    """Minimum-volume enclosing ellipsoid via Khachiyan's barycentric ascent.

    The returned ellipsoid is rescaled so the farthest input point lies
    exactly on the boundary; with termination parameter ``eps`` its volume is
    within a (1+eps) factor of optimal, so shrinking it by (1+eps)^-1 about
    its center must lose at least one point.

    Parameters
    ----------
    points : (n, 2) array_like
    eps : float
        Relative termination tolerance of the ascent.

    Raises
    ------
    DegenerateInput
        If the points are affinely dependent (collinear in the plane).
    NoConvergence
        If the iteration cap is exceeded.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2 or len(p) < 3:
        raise DegenerateInput("need at least 3 planar points")
    if np.linalg.matrix_rank(p - p.mean(axis=0), tol=1e-12 * max(1.0, abs(p).max())) < 2:
        raise DegenerateInput("points are affinely dependent")
    n, d = p.shape
    q = np.column_stack([p, np.ones(n)])  # (n, d+1)
    u = np.full(n, 1.0 / n)
    for _ in range(_MVEE_MAX_ITER):
        x = (q * u[:, None]).T @ q
        m = np.einsum("ij,jk,ik->i", q, np.linalg.inv(x), q)
        j_plus = int(np.argmax(m))
        gap_plus = m[j_plus] / (d + 1.0) - 1.0
        support = u > 1e-14
        m_sup = np.where(support, m, np.inf)
        j_minus = int(np.argmin(m_sup))
        gap_minus = 1.0 - m[j_minus] / (d + 1.0)
        if max(gap_plus, gap_minus) <= eps:
            break
        # Frank-Wolfe ascent with away steps (Todd-Yildirim): increase the
        # weight of the farthest point, or bleed weight off an interior one.
        if gap_plus >= gap_minus:
            j = j_plus
            step = (m[j] - d - 1.0) / ((d + 1.0) * (m[j] - 1.0))
        else:
            j = j_minus
            step = (m[j] - d - 1.0) / ((d + 1.0) * (m[j] - 1.0))
            step = max(step, -u[j] / (1.0 - u[j]))
        u *= 1.0 - step
        u[j] += step
        u[j] = max(u[j], 0.0)
    else:
        raise NoConvergence("MVEE ascent exceeded iteration cap")
    c = u @ p
    cov = (p * u[:, None]).T @ p - np.outer(c, c)
    m = np.linalg.inv(cov) / d
    # Scale so the farthest point touches the boundary exactly.
    diff = p - c
    g = np.einsum("ij,jk,ik->i", diff, m, diff).max()
    return Ellipsoid(c, m / g)


def dilation_factor(inner, outer, clip=None, n_samples=_BOUNDARY_SAMPLES, t_max=None, slack=0.0):
    """Smallest circumscribing and largest inscribed dilation factors.

    ``k_out`` is the smallest t with ``inner`` contained in t * ``outer``
    (dilation about the ellipsoid center). ``k_in`` is the largest t with
    t * ``outer`` intersected with the upper half-plane H = {x2 >= 0} (and
    with ``clip``, when given) contained in ``inner``.

    Parameters
    ----------
    inner : Polytope
    outer : Ellipsoid
    clip : Polytope, optional
        Additional convex region intersected with the dilated ellipsoid
        before testing containment (used for domain-clipped inclusions).
    t_max : float, optional
        Upper end of the bisection bracket; defaults to a multiple of k_out.
    slack : float
        Absolute containment slack granted to ``inner`` when it is a
        discrete under-approximation of the true body (hull sagitta and
        level-interpolation defects).  Candidate filters stay tight so
        points clearly outside H or ``clip`` never enter the test.

    Returns
    -------
    (k_in, k_out) : tuple of float

    Raises
    ------
    EmptyIntersection
        If the dilated ellipsoid never meets H (and clip) for any t <= t_max.
    """
    g = outer.gauge(inner.vertices)
    k_out = float(np.sqrt(g.max()))
    if t_max is None:
        t_max = max(4.0 * k_out, 1e-6)

    bd1 = outer.boundary_points(n_samples)
    tol = max(1e-9, 1e-12 * inner.diameter)
    # Boundary sampling limits certification accuracy; keep the bisection a
    # couple of orders finer than the angular resolution.
    clip_pts = clip.boundary_points(n_samples // 4) if clip is not None else None

    def candidates(t):
        pts = outer.center + t * (bd1 - outer.center)
        keep = pts[:, 1] >= -tol
        if clip is not None:
            keep &= clip.contains(pts, tol=tol)
        cand = [pts[keep]]
        lo, hi = _chord_on_axis(outer, t)
        if lo is not None:
            chord = np.array([[lo, 0.0], [hi, 0.0]])
            if clip is not None:
                chord = chord[clip.contains(chord, tol=tol)]
            cand.append(chord)
        if clip_pts is not None:
            inside = outer.gauge(clip_pts) <= t * t
            inside &= clip_pts[:, 1] >= -tol
            cand.append(clip_pts[inside])
        kept = [c for c in cand if len(c)]
        return np.vstack(kept) if kept else np.empty((0, 2))

    def contained(t):
        c = candidates(t)
        if len(c) == 0:
            return None  # empty intersection: vacuous
        return bool(np.all(inner.contains(c, tol=max(tol, 1e-5 * t, slack))))

    top = contained(t_max)
    if top is None:
        raise EmptyIntersection("dilated ellipsoid never meets the half-plane")
    if top:
        return t_max, k_out
    t_lo, t_hi = 0.0, t_max
    for _ in range(60):
        mid = 0.5 * (t_lo + t_hi)
        ok = contained(mid)
        if ok is None or ok:
            t_lo = mid
        else:
            t_hi = mid
        if t_hi - t_lo <= 1e-6 * t_max:
            break
    return t_lo, k_out


def _chord_on_axis(outer, t):
    """Endpoints of {x2 = 0} chord of the t-dilated ellipsoid, or (None, None)."""
    c = outer.center
    m = outer.shape
    # (x - c)^T M (x - c) = t^2 with x = (s, 0):
    a = m[0, 0]
    b = -2.0 * (m[0, 0] * c[0] + m[0, 1] * c[1])
    cc = m[0, 0] * c[0] ** 2 + 2.0 * m[0, 1] * c[0] * c[1] + m[1, 1] * c[1] ** 2 - t * t
    disc = b * b - 4.0 * a * cc
    if disc <= 0.0:
        return None, None
    r = np.sqrt(disc)
    return (-b - r) / (2.0 * a), (-b + r) / (2.0 * a)
