"""Problem definitions: convex domains, boundary data, and the test catalog.

A problem is a convex planar domain whose boundary passes through the origin
with an interior tangent ball B_rho(rho*e2), a right-hand side f pinched
between positive constants, and Dirichlet data with quadratic growth at the
origin. Problems round-trip through a strict JSON format.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, GrowthViolated, UnknownName
from .geometry import Polytope, convex_hull

_ORIGIN_TOL = 1e-9
_BALL_SAMPLES = 720


class ConvexDomain:
    """Convex domain given as a polygon or a disk, with tangency scale rho.

    Parameters
    ----------
    boundary : Polytope or tuple
        Either a Polytope or a ``(center, radius)`` pair describing a disk.
    rho : float
        Tangency scale: B_rho(rho*e2) should sit inside the domain and the
        domain inside B_{1/rho} intersected with the upper half-plane.
    """

    def __init__(self, boundary, rho):
        if not 0.0 < rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        self.rho = float(rho)
        if isinstance(boundary, Polytope):
            self.kind = "polygon"
            self._poly = boundary
            self.center = None
            self.radius = None
        else:
            center, radius = boundary
            if radius <= 0.0:
                raise ValueError("disk radius must be positive")
            self.kind = "disk"
            self.center = np.asarray(center, dtype=float).reshape(2)
            self.radius = float(radius)
            self._poly = None

    @property
    def diameter(self):
        if self.kind == "disk":
            return 2.0 * self.radius
        return self._poly.diameter

    def contains(self, points, tol=None):
        if tol is None:
            tol = _ORIGIN_TOL * self.diameter
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "disk":
            return np.hypot(*(p - self.center).T) <= self.radius + tol
        return self._poly.contains(p, tol=tol)

    def signed_violation(self, points):
        """Positive where a point lies outside the domain, 0 inside."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "disk":
            return np.maximum(np.hypot(*(p - self.center).T) - self.radius, 0.0)
        slack = p @ self._poly._normals.T - self._poly._offsets
        return np.maximum(slack.max(axis=1), 0.0)

    def ray_exit(self, origins, directions):
        """Exit parameters t > 0 with origin + t*direction on the boundary.

        Origins must lie inside the domain; directions need not be unit.
        """
        x = np.atleast_2d(np.asarray(origins, dtype=float))
        d = np.atleast_2d(np.asarray(directions, dtype=float))
        if self.kind == "disk":
            xc = x - self.center
            a = np.einsum("ij,ij->i", d, d)
            b = np.einsum("ij,ij->i", d, xc)
            c = np.einsum("ij,ij->i", xc, xc) - self.radius**2
            disc = np.maximum(b * b - a * c, 0.0)
            return (-b + np.sqrt(disc)) / a
        n = self._poly._normals
        off = self._poly._offsets
        num = off - x @ n.T
        den = d @ n.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(den > 1e-300, num / den, np.inf)
        t = np.where(t >= 0.0, t, np.inf)
        return t.min(axis=1)

    def boundary_points(self, n):
        """``n`` boundary points equispaced by arclength."""
        if self.kind == "disk":
            a = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
            return self.center + self.radius * np.column_stack([np.cos(a), np.sin(a)])
        return self._poly.boundary_points(n)

    def polygon(self, n=720):
        """Polygonal representation (inscribed n-gon for disks)."""
        if self.kind == "polygon":
            return self._poly
        # Phase the samples so the tangency point is hit exactly when the
        # disk touches the origin.
        a0 = np.arctan2(-self.center[1], -self.center[0])
        a = a0 + np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        pts = self.center + self.radius * np.column_stack([np.cos(a), np.sin(a)])
        return Polytope(pts)

    def bounding_box(self):
        if self.kind == "disk":
            lo = self.center - self.radius
            hi = self.center + self.radius
        else:
            lo = self._poly.vertices.min(axis=0)
            hi = self._poly.vertices.max(axis=0)
        return lo, hi

    def origin_boundary_distance(self):
        if self.kind == "disk":
            return abs(float(np.hypot(*self.center)) - self.radius)
        v = self._poly.vertices
        w = np.roll(v, -1, axis=0)
        e = w - v
        t = np.clip(-np.einsum("ij,ij->i", v, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
        near = v + e * t[:, None]
        return float(np.hypot(*near.T).min())


class BoundaryData:
    """Dirichlet data descriptor with quadratic growth constant mu.

    Descriptor kinds:

    * ``constant``: phi(x) = value away from the origin, phi(0) = 0.
    * ``quadratic``: phi(x) = a11 x1^2 + 2 a12 x1 x2 + a22 x2^2.
    * ``table``: boundary samples with values, interpolated linearly along
      the sample polyline.
    """

    def __init__(self, phi, mu):
        if not 0.0 < mu <= 1.0:
            raise ValueError("mu must lie in (0, 1]")
        kind = phi.get("type")
        if kind == "constant":
            _require_fields(phi, {"type", "value"}, "phi")
        elif kind == "quadratic":
            _require_fields(phi, {"type", "coeffs"}, "phi")
            if len(phi["coeffs"]) != 3:
                raise ValueError("quadratic phi needs coeffs (a11, a12, a22)")
        elif kind == "table":
            _require_fields(phi, {"type", "points", "values"}, "phi")
            if len(phi["points"]) != len(phi["values"]) or len(phi["points"]) < 2:
                raise ValueError("table phi needs matching points and values")
        else:
            raise ValueError(f"unknown phi type: {kind!r}")
        self.phi = phi
        self.mu = float(mu)

    @property
    def base(self):
        """Data value approached at the origin along the boundary.

        The tangent-plane normalization subtracts base + s*.x2 from the
        solution; for constant data the base is the constant itself, for the
        other kinds it is 0 (their descriptors already vanish at the origin).
        """
        if self.phi["type"] == "constant":
            return float(self.phi["value"])
        return 0.0

    def solve_values(self, points):
        """Raw Dirichlet values as the PDE sees them (no origin exception)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if self.phi["type"] == "constant":
            return np.full(len(p), float(self.phi["value"]))
        return self.evaluate(p)

    def evaluate(self, points):
        """Data values with the normalized-trace convention phi(0) = 0."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        kind = self.phi["type"]
        if kind == "constant":
            vals = np.full(len(p), float(self.phi["value"]))
            at_origin = np.hypot(p[:, 0], p[:, 1]) <= _ORIGIN_TOL
            vals[at_origin] = 0.0
            return vals
        if kind == "quadratic":
            a11, a12, a22 = (float(c) for c in self.phi["coeffs"])
            return a11 * p[:, 0] ** 2 + 2.0 * a12 * p[:, 0] * p[:, 1] + a22 * p[:, 1] ** 2
        pts = np.asarray(self.phi["points"], dtype=float)
        vals = np.asarray(self.phi["values"], dtype=float)
        return _polyline_interp(pts, vals, p)


def _polyline_interp(pts, vals, queries):
    """Interpolate values along the closed polyline of boundary samples."""
    a = pts
    b = np.roll(pts, -1, axis=0)
    va = vals
    vb = np.roll(vals, -1)
    e = b - a
    ee = np.einsum("ij,ij->i", e, e)
    out = np.empty(len(queries))
    for i, q in enumerate(queries):
        t = np.clip(np.einsum("ij,ij->i", (q - a), e) / np.maximum(ee, 1e-300), 0.0, 1.0)
        proj = a + e * t[:, None]
        d2 = np.einsum("ij,ij->i", q - proj, q - proj)
        j = int(np.argmin(d2))
        out[i] = va[j] + (vb[j] - va[j]) * t[j]
    return out


@dataclass
class ProblemSpec:
    """Complete problem: domain, right-hand side, pinch constants, data."""

    domain: ConvexDomain
    f: dict
    lam: float
    Lam: float
    boundary: BoundaryData
    name: str = "problem"

    def __post_init__(self):
        if not 0.0 < self.lam <= self.Lam:
            raise ValueError("need 0 < lambda <= Lambda")
        kind = self.f.get("type")
        if kind == "constant":
            _require_fields(self.f, {"type", "value"}, "f")
            vals = [float(self.f["value"])]
        elif kind == "piecewise":
            _require_fields(self.f, {"type", "cells", "default"}, "f")
            vals = [float(c["value"]) for c in self.f["cells"]] + [float(self.f["default"])]
            for c in self.f["cells"]:
                _require_fields(c, {"bounds", "value"}, "f cell")
        else:
            raise ValueError(f"unknown f type: {kind!r}")
        bad = [v for v in vals if not (self.lam - 1e-12 <= v <= self.Lam + 1e-12)]
        if bad:
            raise ValueError(f"f values {bad} break lambda <= f <= Lambda")

    def f_at(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if self.f["type"] == "constant":
            return np.full(len(p), float(self.f["value"]))
        out = np.full(len(p), float(self.f["default"]))
        for cell in self.f["cells"]:
            x0, x1, y0, y1 = (float(v) for v in cell["bounds"])
            inside = (p[:, 0] >= x0) & (p[:, 0] < x1) & (p[:, 1] >= y0) & (p[:, 1] < y1)
            out[inside] = float(cell["value"])
        return out


@dataclass
class DomainReport:
    passed: bool
    origin_on_boundary: bool
    ball_inside: bool
    inside_sandwich: bool
    worst_violation: float
    details: dict = field(default_factory=dict)


@dataclass
class GrowthReport:
    passed: bool
    tightest_mu: float
    n_samples: int


def validate_domain(domain, tol=1e-7):
    """Check the three standing domain inclusions, reporting the worst slack.

    1. the origin lies on the boundary;
    2. B_rho(rho*e2) is inside the domain (720 boundary samples);
    3. the domain is inside {x2 >= 0} and B_{1/rho}.
    """
    rho = domain.rho
    scale = max(domain.diameter, 1.0)
    origin_dist = domain.origin_boundary_distance()
    origin_ok = origin_dist <= tol * scale

    ang = np.linspace(0.0, 2.0 * np.pi, _BALL_SAMPLES, endpoint=False)
    ball = np.column_stack([rho * np.cos(ang), rho + rho * np.sin(ang)])
    viol_ball = float(domain.signed_violation(ball).max())
    ball_ok = viol_ball <= tol * scale

    if domain.kind == "disk":
        min_x2 = domain.center[1] - domain.radius
        max_norm = float(np.hypot(*domain.center)) + domain.radius
    else:
        v = domain._poly.vertices
        min_x2 = float(v[:, 1].min())
        max_norm = float(np.hypot(v[:, 0], v[:, 1]).max())
    viol_half = max(0.0, -min_x2)
    viol_ball_out = max(0.0, max_norm - 1.0 / rho)
    sandwich_ok = viol_half <= tol * scale and viol_ball_out <= tol * scale

    worst = max(origin_dist if not origin_ok else 0.0, viol_ball, viol_half, viol_ball_out)
    return DomainReport(
        passed=bool(origin_ok and ball_ok and sandwich_ok),
        origin_on_boundary=bool(origin_ok),
        ball_inside=bool(ball_ok),
        inside_sandwich=bool(sandwich_ok),
        worst_violation=float(worst),
        details={
            "origin_distance": origin_dist,
            "ball_violation": viol_ball,
            "halfplane_violation": viol_half,
            "outer_ball_violation": viol_ball_out,
        },
    )


def validate_growth(boundary, domain, samples=720):
    """Check mu |x|^2 <= phi <= mu^-1 |x|^2 on the boundary near the origin.

    The check runs on boundary points with x2 <= rho. For constant data the
    pointwise inequality can never hold near the origin; in that case the
    effective post-normalization data is a multiple of x2, and the check
    becomes the geometric one: the domain must sit inside a ball tangent to
    {x2 = 0} at the origin. The tightest mu is then computed from rho and
    the tangent ball radius.

    Returns
    -------
    GrowthReport

    Raises
    ------
    GrowthViolated
        If the declared mu is inadmissible; carries the witness point.
    """
    if samples < 100:
        raise ValueError("need at least 100 boundary samples")
    rho = domain.rho
    pts = domain.boundary_points(samples)
    mu = boundary.mu

    if boundary.phi["type"] == "constant":
        r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
        keep = r2 > (1e-6 * domain.diameter) ** 2
        p = pts[keep]
        flat = p[:, 1] <= 1e-9 * domain.diameter
        if np.any(flat):
            w = p[flat][0]
            raise GrowthViolated(
                "constant data on a flat boundary segment has no quadratic growth",
                witness=(float(w[0]), float(w[1])),
            )
        r_star = float(((p[:, 0] ** 2 + p[:, 1] ** 2) / (2.0 * p[:, 1])).max())
        tightest = min(1.0, 1.0 / (2.0 * r_star), 2.0 * rho)
        if mu > tightest * (1.0 + 1e-9):
            raise GrowthViolated(
                f"declared mu={mu} exceeds admissible {tightest}", witness=None
            )
        return GrowthReport(passed=True, tightest_mu=tightest, n_samples=int(keep.sum()))

    near = pts[pts[:, 1] <= rho + 1e-12]
    r2 = near[:, 0] ** 2 + near[:, 1] ** 2
    keep = r2 > (1e-9 * domain.diameter) ** 2
    near, r2 = near[keep], r2[keep]
    vals = boundary.evaluate(near)
    with np.errstate(divide="ignore"):
        low = vals / r2
        high = np.where(vals > 0.0, r2 / vals, np.inf)
    per_point = np.minimum(low, high)
    j = int(np.argmin(per_point))
    tightest = float(min(1.0, per_point[j]))
    if tightest <= 0.0 or mu > tightest * (1.0 + 1e-9):
        raise GrowthViolated(
            f"growth bound fails for mu={mu} (admissible up to {tightest})",
            witness=(float(near[j, 0]), float(near[j, 1])),
        )
    return GrowthReport(passed=True, tightest_mu=tightest, n_samples=len(near))


def half_disk_domain(radius=1.0, rho=0.45, n_arc=720):
    """Half-disk {|x| <= radius, x2 >= 0} as a polygon with a flat bottom."""
    theta = np.linspace(0.0, np.pi, n_arc + 1)
    arc = radius * np.column_stack([np.cos(theta), np.sin(theta)])
    return ConvexDomain(Polytope(arc), rho)


def make_standard_problem(name):
    """Build a catalog problem: radial, sheared, constant-bdry, or
    random-polygon[-seed]."""
    if name == "radial":
        dom = half_disk_domain()
        return ProblemSpec(
            domain=dom,
            f={"type": "constant", "value": 4.0},
            lam=4.0,
            Lam=4.0,
            boundary=BoundaryData({"type": "quadratic", "coeffs": [1.0, 0.0, 1.0]}, mu=1.0),
            name="radial",
        )
    if name == "sheared":
        dom = half_disk_domain()
        return ProblemSpec(
            domain=dom,
            f={"type": "constant", "value": 4.0},
            lam=4.0,
            Lam=4.0,
            boundary=BoundaryData({"type": "quadratic", "coeffs": [2.0, 1.0, 1.0]}, mu=0.35),
            name="sheared",
        )
    if name == "constant-bdry":
        dom = ConvexDomain(((0.0, 0.5), 0.5), rho=0.5)
        return ProblemSpec(
            domain=dom,
            f={"type": "constant", "value": 1.0},
            lam=1.0,
            Lam=1.0,
            boundary=BoundaryData({"type": "constant", "value": 1.0}, mu=1.0),
            name="constant-bdry",
        )
    if name == "random-polygon" or name.startswith("random-polygon-"):
        seed = 0
        if name.startswith("random-polygon-"):
            seed = int(name.rsplit("-", 1)[1])
        return _random_polygon_problem(seed)
    raise UnknownName(f"no catalog problem named {name!r}")


def _random_polygon_problem(seed):
    rng = np.random.default_rng(20_240_000 + seed)
    rho = 0.35
    ball_c = np.array([0.0, rho])
    for _ in range(64):
        a = rng.uniform(0.45, 0.75)
        b = rng.uniform(0.45, 0.75)
        n_up = int(rng.integers(9, 14))
        angles = np.sort(rng.uniform(0.15, np.pi - 0.15, n_up))
        radii = rng.uniform(1.45 * rho, 2.4 * rho, n_up)
        pts = ball_c + radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
        pts = pts[pts[:, 1] > 0.05]
        cand = np.vstack([[[b, 0.0], [-a, 0.0]], pts])
        norms = np.hypot(cand[:, 0], cand[:, 1])
        cand = cand[norms <= 0.9 / rho]
        try:
            poly = convex_hull(cand)
        except DegenerateInput:
            continue
        dom = ConvexDomain(poly, rho)
        rep = validate_domain(dom)
        if not rep.passed:
            continue
        # Random positive quadratic data with modest eigenvalue spread.
        e1, e2 = rng.uniform(0.8, 1.25, 2)
        psi = rng.uniform(0.0, np.pi)
        cs, sn = np.cos(psi), np.sin(psi)
        q11 = e1 * cs * cs + e2 * sn * sn
        q22 = e1 * sn * sn + e2 * cs * cs
        q12 = (e1 - e2) * cs * sn
        bd_probe = BoundaryData({"type": "quadratic", "coeffs": [q11, q12, q22]}, mu=1e-6)
        report = validate_growth(bd_probe, dom)
        mu = min(1.0, 0.95 * report.tightest_mu)
        bd = BoundaryData({"type": "quadratic", "coeffs": [q11, q12, q22]}, mu=mu)
        lo, hi = dom.bounding_box()
        cells = []
        nx = ny = 4
        xs = np.linspace(lo[0] - 1e-6, hi[0] + 1e-6, nx + 1)
        ys = np.linspace(lo[1] - 1e-6, hi[1] + 1e-6, ny + 1)
        for i in range(nx):
            for j in range(ny):
                cells.append(
                    {
                        "bounds": [float(xs[i]), float(xs[i + 1]), float(ys[j]), float(ys[j + 1])],
                        "value": float(rng.uniform(1.0, 2.0)),
                    }
                )
        return ProblemSpec(
            domain=dom,
            f={"type": "piecewise", "cells": cells, "default": 1.0},
            lam=1.0,
            Lam=2.0,
            boundary=bd,
            name=f"random-polygon-{seed}",
        )
    raise DegenerateInput(f"could not draw a valid random polygon for seed {seed}")


# ---------------------------------------------------------------------------
# JSON round-trip


def problem_to_dict(spec):
    if spec.domain.kind == "disk":
        dom = {
            "type": "disk",
            "center": [float(spec.domain.center[0]), float(spec.domain.center[1])],
            "radius": spec.domain.radius,
            "rho": spec.domain.rho,
        }
    else:
        dom = {
            "type": "polygon",
            "vertices": [[float(x), float(y)] for x, y in spec.domain._poly.vertices],
            "rho": spec.domain.rho,
        }
    return {
        "domain": dom,
        "f": spec.f,
        "lambda": spec.lam,
        "Lambda": spec.Lam,
        "phi": spec.boundary.phi,
        "mu": spec.boundary.mu,
        "name": spec.name,
    }


def problem_from_dict(data, name=None):
    data = dict(data)
    stored = data.pop("name", None)
    _require_fields(data, {"domain", "f", "lambda", "Lambda", "phi", "mu"}, "problem")
    dom = data["domain"]
    kind = dom.get("type")
    if kind == "polygon":
        _require_fields(dom, {"type", "vertices", "rho"}, "domain")
        domain = ConvexDomain(Polytope(np.asarray(dom["vertices"], dtype=float)), dom["rho"])
    elif kind == "disk":
        _require_fields(dom, {"type", "center", "radius", "rho"}, "domain")
        domain = ConvexDomain((dom["center"], dom["radius"]), dom["rho"])
    else:
        raise ValueError(f"unknown domain type: {kind!r}")
    boundary = BoundaryData(data["phi"], data["mu"])
    return ProblemSpec(
        domain=domain,
        f=data["f"],
        lam=float(data["lambda"]),
        Lam=float(data["Lambda"]),
        boundary=boundary,
        name=name or stored or "problem",
    )


def save_problem(spec, path):
    parent = os.path.dirname(str(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(problem_to_dict(spec), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_problem(path, name=None):
    with open(path) as fh:
        data = json.load(fh)
    if name is None and "name" not in data:
        name = os.path.splitext(os.path.basename(str(path)))[0]
    return problem_from_dict(data, name=name)


def _require_fields(mapping, allowed, label):
    unknown = set(mapping) - allowed
    if unknown:
        raise ValueError(f"unknown {label} fields: {sorted(unknown)}")
    missing = allowed - set(mapping)
    if missing:
        raise ValueError(f"missing {label} fields: {sorted(missing)}")
