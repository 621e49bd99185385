"""Boundary sections of a solved Monge-Ampere problem and their normal forms.

Pipeline: subtract the tangent plane at the origin (tangent_normalize), cut
the sublevel set at height h (extract_section), slide it so the centroid
sits on the x2-axis (sliding_map), and read off John-type metrics against
the model ellipsoid E_h = A^{-1}(sqrt(h) B_1) (john_normalize).  The
dimensionless height b(h) = h^{-1/2} sup x2 and the per-level metrics feed
the sweep module.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateCentroid, EmptySection, NegativeValues
from .geometry import Ellipsoid, Polytope, area, centroid, convex_hull, dilation_factor, mvee

_MIN_SECTION_NODES = 10
_ALPHA_REF = 2.0 / 3.0  # n/(n+1) with n = 2, the d_n lower-bound exponent
_TILT_FLAG_RADIANS = 0.2


@dataclass
class SlidingMap:
    """Volume-preserving shear A(x) = x - nu*x2*e1 fixing {x2 = 0}."""

    nu: float

    @property
    def matrix(self):
        return np.array([[1.0, -self.nu], [0.0, 1.0]])

    def apply(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = p.copy()
        out[:, 0] -= self.nu * p[:, 1]
        return out

    def apply_inverse(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = p.copy()
        out[:, 0] += self.nu * p[:, 1]
        return out


@dataclass
class Section:
    """Closure of {u < h} with its boundary-graph samples."""

    h: float
    body: Polytope
    graph_part: np.ndarray
    centroid: np.ndarray
    domain: object = None
    n_inside: int = 0
    spacing: float = 0.0


@dataclass
class SectionMetrics:
    """Per-level normal-form summary used by sweeps and reports."""

    h: float
    area: float
    b: float
    nu: SlidingMap
    d: tuple
    k_in: float
    k_out: float
    centroid_offset: float
    axis_angle: float
    alpha_ref: float = _ALPHA_REF
    flags: list = field(default_factory=list)


@dataclass
class RescaledSolution:
    """Normalized solution v(z) = u(sqrt(h) A^{-1} z)/h sampled at z = A(x)/sqrt(h)."""

    points: np.ndarray
    values: np.ndarray
    body: Polytope
    domain_body: Polytope
    c: float
    C: float


def _tier_minimum(values, x2, cutoff):
    mask = x2 >= cutoff
    if not np.any(mask):
        return None
    return float((values[mask] / x2[mask]).min())


def tangent_normalize(solution, base=0.0):
    """Subtract the supporting tangent plane base + s*.x2 at the origin.

    The slope is the infimum of (u - base)/x2 over interior nodes, taken on
    the tiers x2 >= 2*spacing and x2 >= 4*spacing and extrapolated to the
    boundary; the extrapolation removes the O(spacing) one-sided bias while
    never exceeding the tier infimum, so the result stays nonnegative on
    the sampled tiers.  The output has u >= 0 (within discretization slack),
    u(0) = 0, and no remaining eps*x2 supporting plane.

    Parameters
    ----------
    solution : GridSolution
    base : float
        The solution's boundary value at the origin (0 for data vanishing
        there; the constant for constant data).

    Returns
    -------
    GridSolution
        New solution with shifted values and boundary samples and with
        tangent_slope/tangent_base recorded.

    Raises
    ------
    NegativeValues
        If the normalized values dip below zero by more than the
        discretization slack (a solver-failure signal).
    """
    g = solution.grid
    w = solution.values - base
    x2 = g.nodes[:, 1]
    sp = g.spacing
    m1 = _tier_minimum(w, x2, 2.0 * sp)
    m2 = _tier_minimum(w, x2, 4.0 * sp)
    if m1 is None:
        raise NegativeValues("no interior nodes above the exclusion band")
    slope = m1 if m2 is None else 2.0 * m1 - m2
    if base == 0.0:
        # u >= 0 with u(0) = 0 rules out negative supporting slopes; the
        # extrapolation can dip below zero only through discretization noise
        slope = max(slope, 0.0)
    values = w - slope * x2

    bv_p = solution.bv_p.copy()
    bv_m = solution.bv_m.copy()
    for bv, nbr, cut_id, cut_xy in (
        (bv_p, g.nbr_p, g.cut_id_p, g.cut_xy_p),
        (bv_m, g.nbr_m, g.cut_id_m, g.cut_xy_m),
    ):
        cut = nbr < 0
        bv[cut] = bv[cut] - base - slope * cut_xy[cut_id[cut], 1]

    scale = max(1.0, float(np.abs(w).max()))
    tol = sp**2 * scale
    worst = float(values.min())
    if worst < -tol:
        raise NegativeValues(
            f"normalized solution dips to {worst:.3e} (tolerance {-tol:.3e})"
        )
    return replace(
        solution,
        values=values,
        bv_p=bv_p,
        bv_m=bv_m,
        tangent_slope=float(slope),
        tangent_base=float(base),
    )


def _axis_crossings(solution, h, d, lo):
    """Level-h crossing points on the two arms of axis direction d.

    lo selects inside nodes (u < h); crossings are interpolated against
    interior neighbors at or above h and against boundary cut points whose
    data is at or above h.  Cut points below h are handled separately.
    """
    g = solution.grid
    vals = solution.values
    pieces = []
    for nbr, bv, cut_id, cut_xy in (
        (g.nbr_p[:, d], solution.bv_p[:, d], g.cut_id_p[:, d], g.cut_xy_p),
        (g.nbr_m[:, d], solution.bv_m[:, d], g.cut_id_m[:, d], g.cut_xy_m),
    ):
        interior = nbr >= 0
        i = np.flatnonzero(lo & interior)
        j = nbr[i]
        up = vals[j] >= h
        i, j = i[up], j[up]
        if len(i):
            t = ((h - vals[i]) / (vals[j] - vals[i]))[:, None]
            pieces.append(g.nodes[i] + t * (g.nodes[j] - g.nodes[i]))
        i = np.flatnonzero(lo & ~interior)
        if len(i):
            vb = bv[i]
            above = vb >= h
            if np.any(above):
                ii = i[above]
                xc = cut_xy[cut_id[ii]]
                t = ((h - vals[ii]) / (vb[above] - vals[ii]))[:, None]
                pieces.append(g.nodes[ii] + t * (xc - g.nodes[ii]))
    return pieces


def boundary_graph_points(domain, boundary, tangent, h, n=2880):
    """Dense analytic sampling of G_h = {x on the domain boundary: u < h}.

    Evaluates the normalized boundary data (raw data minus base minus
    slope*x2) on n points equispaced along the boundary, then refines each
    crossing of the level h by bisection along the boundary chord, so the
    endpoints of G_h are resolved far below both the grid spacing and the
    sample spacing (the endpoints control the slid centroid's symmetry).
    """
    pts = domain.polygon(max(720, n // 4)).boundary_points(n)
    base, slope = tangent

    def normalized(p):
        p = np.atleast_2d(p)
        return boundary.solve_values(p) - base - slope * p[:, 1]

    vals = normalized(pts)
    below = vals < h
    out = [pts[below]]
    for i in np.flatnonzero(below != np.roll(below, -1)):
        j = (i + 1) % len(pts)
        a, b = pts[i], pts[j]
        fa = vals[i]
        for _ in range(40):
            mid = 0.5 * (a + b)
            fm = normalized(mid)[0]
            if (fm < h) == (fa < h):
                a, fa = mid, fm
            else:
                b = mid
        out.append((a if fa < h else b)[None, :])
    return np.vstack(out) if out else np.empty((0, 2))


def extract_section(solution, h, boundary=None):
    """Closure of the sublevel set {u < h} as a convex polygon.

    The body is the convex hull of the interior nodes below h, the level-h
    crossings on axis arms (marching-squares edge interpolation on the
    clipped lattice), the boundary samples with data below h, and the
    origin.  The graph_part holds boundary points with data below h plus
    the origin; by convexity each such point, and the segment joining it
    to the origin, belongs to the closed section.  When the problem's
    boundary data is passed, G_h is sampled densely and analytically along
    the boundary, which pins the section's boundary corners far below grid
    resolution; otherwise only the stored cut samples are used.

    Raises
    ------
    EmptySection
        If fewer than 10 interior nodes lie below h.
    """
    g = solution.grid
    vals = solution.values
    lo = vals < h
    n_inside = int(lo.sum())
    if n_inside < _MIN_SECTION_NODES:
        raise EmptySection(f"{n_inside} nodes below h={h:.3e} (need {_MIN_SECTION_NODES})")

    ix, iy = g.axis_direction_indices()
    pieces = [np.zeros((1, 2)), g.nodes[lo]]
    for d in (ix, iy):
        pieces.extend(_axis_crossings(solution, h, d, lo))

    # boundary samples below h (any stencil direction) are in the closed
    # section and constitute the boundary graph G_h
    graph = [np.zeros((1, 2))]
    for nbr, bv, cut_id, cut_xy in (
        (g.nbr_p, solution.bv_p, g.cut_id_p, g.cut_xy_p),
        (g.nbr_m, solution.bv_m, g.cut_id_m, g.cut_xy_m),
    ):
        cut = (nbr < 0) & (bv < h)
        if np.any(cut):
            graph.append(cut_xy[cut_id[cut]])
    if boundary is not None:
        tangent = (solution.tangent_base, solution.tangent_slope or 0.0)
        dense = boundary_graph_points(g.domain, boundary, tangent, h)
        if len(dense):
            graph.append(dense)
    graph_pts = np.unique(np.round(np.vstack(graph), 14), axis=0)
    pieces.append(graph_pts)

    body = convex_hull(np.vstack(pieces))
    return Section(
        h=float(h),
        body=body,
        graph_part=graph_pts,
        centroid=centroid(body),
        domain=g.domain,
        n_inside=n_inside,
        spacing=g.spacing,
    )


def b_value(section):
    """Dimensionless section height h^{-1/2} * sup x2 over the body."""
    return float(section.body.vertices[:, 1].max() / np.sqrt(section.h))


def map_section(section, matrix):
    """Image of a section under an orientation-preserving linear map.

    Maps the body, graph samples, and centroid (linear maps commute with
    centroids).  The domain reference is dropped since the map need not
    have a represented image domain; intended for the invariance checks
    (sliding maps and {x2 = 0}-preserving transforms).
    """
    m = np.asarray(matrix, dtype=float).reshape(2, 2)
    if np.linalg.det(m) <= 0.0:
        raise ValueError("linear map must preserve orientation")
    return Section(
        h=section.h,
        body=Polytope(section.body.vertices @ m.T),
        graph_part=section.graph_part @ m.T,
        centroid=m @ section.centroid,
        domain=None,
        n_inside=section.n_inside,
        spacing=0.0,
    )


def sliding_map(section):
    """Shear taking the section centroid onto the x2-axis.

    nu = x*_1 / x*_2 from the centroid x*; the slid centroid then lies on
    the x2-axis exactly (the map is linear and area-preserving).

    Raises
    ------
    DegenerateCentroid
        If the centroid height x*_2 is at tolerance zero.
    """
    cx, cy = section.centroid
    if cy <= 1e-10:
        raise DegenerateCentroid(f"centroid height {cy:.3e}")
    return SlidingMap(nu=float(cx / cy))


def _hull_slack(section):
    """Absolute under-approximation bound for the discrete section hull.

    Two defects separate the hull from the true section: the sagitta of
    boundary chords between consecutive samples (curvature at most 1/rho)
    and the linear-interpolation error of the level-h crossings, whose
    gradient scale is sqrt(h) near the level line.
    """
    sp = section.spacing
    if sp <= 0.0:
        return 0.0
    rho = getattr(section.domain, "rho", None) if section.domain is not None else None
    curv = 1.0 / rho if rho else 0.0
    return sp * sp * (curv + 0.25 / np.sqrt(section.h))


def john_normalize(section, sliding, clip_points=720):
    """John-type normal form of the slid section against E_h.

    Slides the body, symmetrizes it across {x2 = 0}, fits the minimum
    volume enclosing ellipse, and labels the semi-axis closest to e2 as
    d2.  The equivalence constants compare the original body with
    E_h = A^{-1}(sqrt(h) B_1): k_out is the smallest dilation of E_h
    containing the body, k_in the largest whose intersection with the
    domain stays inside the body (up to the hull's discretization slack).
    A tilt flag is raised when the fitted axes are misaligned with the
    sliding frame by more than 0.2 rad; for near-circular fits (axes
    within 2%) the principal frame is ill-conditioned and the angle is
    reported as zero.
    """
    h = section.h
    slid = sliding.apply(section.body.vertices)
    sym = convex_hull(np.vstack([slid, slid * np.array([1.0, -1.0])]))
    # near-circular sections put hundreds of points on the optimal ellipse,
    # Khachiyan's slow regime; 1e-4 keeps axes far inside the 3% tolerances
    ell = mvee(sym.vertices, eps=1e-4)
    evals, evecs = np.linalg.eigh(ell.shape)
    axes = 1.0 / np.sqrt(evals)  # eigenvalue 1/a^2 per axis
    which = int(np.argmax(np.abs(evecs[1])))  # column most aligned with e2
    d2 = float(axes[which])
    d1 = float(axes[1 - which])
    axis_angle = float(np.arccos(min(1.0, abs(evecs[1, which]))))
    if abs(d2 - d1) <= 0.02 * max(d1, d2):
        axis_angle = 0.0

    a = sliding.matrix
    e_h = Ellipsoid(np.zeros(2), a.T @ a / h)
    clip = section.domain.polygon(clip_points) if section.domain is not None else None
    k_in, k_out = dilation_factor(section.body, e_h, clip=clip, slack=_hull_slack(section))
    # containment slack can push k_in past k_out when the section equals a
    # dilate of E_h exactly; the true constants always satisfy k_in <= k_out
    k_in = min(k_in, k_out)

    slid_centroid = sliding.apply(section.centroid)[0]
    flags = []
    if axis_angle > _TILT_FLAG_RADIANS:
        flags.append("tilted")
    return SectionMetrics(
        h=h,
        area=area(section.body),
        b=b_value(section),
        nu=sliding,
        d=(d1, d2),
        k_in=float(k_in),
        k_out=float(k_out),
        centroid_offset=float(abs(slid_centroid[0])),
        axis_angle=axis_angle,
        flags=flags,
    )


def rescale_unit(solution, section, sliding, clip_points=720):
    """Normalize to unit height: v(z) = u(sqrt(h) A^{-1} z)/h.

    Maps nodes forward through z = A(x)/sqrt(h) (the map taking E_h onto
    B_1), divides values by h, and reports the sandwich constants (c, C)
    with c B_1 intersected with the mapped domain inside the mapped body
    and the body inside C B_1.
    """
    h = section.h
    s = np.sqrt(h)

    def to_unit(points):
        return sliding.apply(points) / s

    points = to_unit(solution.grid.nodes)
    body = Polytope(to_unit(section.body.vertices))
    domain_poly = section.domain.polygon(clip_points)
    domain_body = Polytope(to_unit(domain_poly.vertices))
    c, C = dilation_factor(
        body, Ellipsoid(np.zeros(2), np.eye(2)), clip=domain_body, slack=_hull_slack(section) / s
    )
    c = min(c, C)
    return RescaledSolution(
        points=points,
        values=solution.values / h,
        body=body,
        domain_body=domain_body,
        c=float(c),
        C=float(C),
    )


def graph_growth_margins(solution, section, sliding, mu, boundary):
    """Quadratic growth check on the slid boundary graph.

    Evaluates the normalized boundary data at the graph_part samples,
    maps the samples by the sliding map, and verifies
    mu/2 |x1|^2 <= u <= 2/mu |x1|^2 with a small absolute slack.

    Returns a dict with the worst lower/upper margins (nonnegative means
    the inequality holds) and the witnessing points.
    """
    pts = section.graph_part
    base = solution.tangent_base
    slope = solution.tangent_slope or 0.0
    vals = boundary.solve_values(pts) - base - slope * pts[:, 1]
    slid = sliding.apply(pts)
    x1sq = slid[:, 0] ** 2
    slack = 1e-9 * max(1.0, float(np.abs(vals).max()))
    lower = vals - 0.5 * mu * x1sq
    upper = 2.0 / mu * x1sq - vals
    i_lo = int(np.argmin(lower))
    i_up = int(np.argmin(upper))
    return {
        "lower_margin": float(lower[i_lo]),
        "upper_margin": float(upper[i_up]),
        "lower_witness": pts[i_lo].tolist(),
        "upper_witness": pts[i_up].tolist(),
        "ok": bool(lower[i_lo] >= -slack and upper[i_up] >= -slack),
    }
