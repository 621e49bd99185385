"""Explicit barrier functions with closed-form Hessian determinants.

Four catalog kinds, all convex on their validity regions:

* ``quadratic``: mu*x1^2 + (Lambda/mu)*x2^2 - c_rho*x2 on the strip
  {0 <= x2 <= rho}; determinant 4*Lambda everywhere.
* ``section-w``: eps*x2 plus axis-aligned quadratics.  Two shapes: the
  fixed-frame shape (C1, alpha) with determinant 2*Lambda*h^(2-3*alpha)
  (identically 2*Lambda at the reference alpha = 2/3), and the John-frame
  shape (c, d) with determinant (2*c*h)^2 / (d1*d2)^2, which exceeds a
  given Lambda exactly when d1*d2 < 2*c*h/sqrt(Lambda).
* ``angular-2d``: r*f(theta) + x2^2/(2M^2) with f = sigma*exp(C0*|pi/2 -
  theta|) on the wedge {theta0 <= theta <= pi - theta0}; determinant
  (C0^2+1)*(f/r)*sin(theta)^2/M^2.  The kink at theta = pi/2 is excluded.
* ``angular-nd``: the n-dimensional analogue r*f(theta) + xn^2/(2M^2)
  with theta the angle to the {xn = 0} plane and f = nu_amp*exp(C0*(pi/2
  - theta)); the transverse directions contribute the factor
  ((f*cos - f'*sin)/(r*cos))^(n-2), which is 1 at n = 2 so the kind
  reduces exactly to angular-2d there.

``verify_subsolution`` samples the validity region and checks the
determinant stays above a given Lambda, cross-checking the closed forms
against finite differences.  ``verify_comparison`` checks barrier <=
solution on the discrete boundary of the region and then reports the
interior margin, the numerical form of the comparison principle.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BoundaryDominanceFails,
    KinkPoint,
    OutsideRegion,
    UnknownName,
)

_KINDS = ("quadratic", "section-w", "angular-2d", "angular-nd")
_KINK_TOL = 1e-12
_KINK_MARGIN = 1e-6
ALPHA_REF = 2.0 / 3.0

_REQUIRED = {
    "quadratic": {"mu", "Lambda", "c_rho", "rho"},
    "angular-2d": {"sigma", "C0", "M", "theta0"},
    "angular-nd": {"nu_amp", "C0", "M", "theta0", "n"},
}


@dataclass(frozen=True)
class BarrierSpec:
    """One catalog barrier: kind, named scalars, and value adjustments.

    ``scale`` multiplies the value (and scales the determinant by
    scale^n); ``offset`` shifts the value only.  Both default to the
    identity and exist for comparison controls.
    """

    kind: str
    params: dict = field(default_factory=dict)
    scale: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise UnknownName(f"no barrier kind named {self.kind!r}")
        if self.kind == "section-w":
            need = {"epsilon", "h", "Lambda"}
            if "d" in self.params:
                need |= {"c"}
            else:
                need |= {"C1"}
            missing = need - set(self.params)
        else:
            missing = _REQUIRED[self.kind] - set(self.params)
        if missing:
            raise ValueError(f"{self.kind} barrier missing {sorted(missing)}")
        for key, val in self.params.items():
            if key in ("d", "n"):
                continue
            if key in ("epsilon",):
                if val < 0:
                    raise ValueError("epsilon must be nonnegative")
                continue
            if not val > 0:
                raise ValueError(f"parameter {key} must be positive, got {val}")
        theta0 = self.params.get("theta0")
        if theta0 is not None and not 0.0 < theta0 < np.pi / 2:
            raise ValueError("theta0 must lie in (0, pi/2)")
        if self.kind == "angular-nd" and int(self.params["n"]) < 2:
            raise ValueError("angular-nd needs dimension n >= 2")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def dim(self):
        return int(self.params.get("n", 2))


def _f_angular(spec, theta):
    """f(theta) and its one-sided derivatives away from the kink."""
    if spec.kind == "angular-2d":
        amp, c0 = spec.params["sigma"], spec.params["C0"]
        f = amp * np.exp(c0 * np.abs(np.pi / 2 - theta))
        fp = np.where(theta < np.pi / 2, -c0 * f, c0 * f)
    else:
        amp, c0 = spec.params["nu_amp"], spec.params["C0"]
        f = amp * np.exp(c0 * (np.pi / 2 - theta))
        fp = -c0 * f
    return f, fp, (c0 * c0) * f


def _eval_quadratic(spec, x):
    mu, lam = spec.params["mu"], spec.params["Lambda"]
    c = spec.params["c_rho"]
    value = mu * x[0] ** 2 + (lam / mu) * x[1] ** 2 - c * x[1]
    grad = np.array([2 * mu * x[0], 2 * (lam / mu) * x[1] - c])
    return value, grad, 4.0 * lam


def _section_w_coeffs(spec):
    """Axis coefficients (a1, a2) with w = eps*x2 + a1 x1^2 + a2 x2^2."""
    p = spec.params
    h = p["h"]
    if "d" in p:
        d1, d2 = p["d"]
        a1 = p["c"] * h / d1**2
        a2 = p["c"] * h / d2**2
    else:
        alpha = p.get("alpha", ALPHA_REF)
        c1 = p["C1"]
        a1 = 0.5 * h ** (1.0 - alpha) / c1**2
        a2 = p["Lambda"] * c1**2 * h ** (1.0 - 2.0 * alpha)
    return a1, a2


def _eval_section_w(spec, x):
    eps = spec.params["epsilon"]
    a1, a2 = _section_w_coeffs(spec)
    value = eps * x[1] + a1 * x[0] ** 2 + a2 * x[1] ** 2
    grad = np.array([2 * a1 * x[0], eps + 2 * a2 * x[1]])
    return value, grad, 4.0 * a1 * a2


def _eval_angular(spec, x):
    m = spec.params["M"]
    x = np.asarray(x, dtype=float)
    if spec.kind == "angular-2d":
        r = float(np.hypot(x[0], x[1]))
        if r == 0.0:
            raise OutsideRegion("angular barrier undefined at the origin")
        theta = float(np.arctan2(x[1], x[0]))
    else:
        r = float(np.linalg.norm(x))
        if r == 0.0:
            raise OutsideRegion("angular barrier undefined at the origin")
        theta = float(np.arcsin(np.clip(x[-1] / r, -1.0, 1.0)))
    if abs(theta - np.pi / 2) <= _KINK_TOL:
        raise KinkPoint(f"theta = pi/2 at {x}")
    f, fp, fpp = _f_angular(spec, theta)
    xn = x[-1]
    value = r * f + xn**2 / (2 * m * m)
    sin, cos = np.sin(theta), np.cos(theta)
    if spec.kind == "angular-2d":
        grad = np.array(
            [f * cos - fp * sin, f * sin + fp * cos + xn / (m * m)]
        )
        transverse = 1.0
    else:
        xhat = x / r
        en = np.zeros_like(x)
        en[-1] = 1.0
        grad = f * xhat + fp * (en - sin * xhat) / cos
        grad[-1] += xn / (m * m)
        n = spec.dim
        transverse = ((f * cos - fp * sin) / (r * cos)) ** (n - 2)
    det = ((fpp + f) / r) * transverse * sin**2 / (m * m)
    return value, grad, float(det)


def evaluate(spec, x, check_region=True):
    """Value, gradient and Hessian determinant of a barrier at ``x``.

    Parameters
    ----------
    spec : BarrierSpec
    x : array_like
        Point of length 2 (or n for angular-nd).
    check_region : bool
        When True (default), points outside the validity region raise
        OutsideRegion.  The angular kink theta = pi/2 always raises
        KinkPoint.

    Returns
    -------
    (float, ndarray, float)
        Value, gradient, and det of the Hessian, all including ``scale``
        (det picks up scale^n) and ``offset`` (value only).
    """
    x = np.asarray(x, dtype=float)
    if check_region and not bool(region_mask(spec, x[None, :])[0]):
        raise OutsideRegion(f"{x} outside {spec.kind} validity region")
    if spec.kind == "quadratic":
        value, grad, det = _eval_quadratic(spec, x)
    elif spec.kind == "section-w":
        value, grad, det = _eval_section_w(spec, x)
    else:
        value, grad, det = _eval_angular(spec, x)
    n = spec.dim
    return (
        spec.scale * value + spec.offset,
        spec.scale * grad,
        spec.scale**n * det,
    )


def values(spec, pts):
    """Vectorized barrier values (scale and offset applied) at ``pts``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if spec.kind == "quadratic":
        mu, lam = spec.params["mu"], spec.params["Lambda"]
        raw = (
            mu * pts[:, 0] ** 2
            + (lam / mu) * pts[:, 1] ** 2
            - spec.params["c_rho"] * pts[:, 1]
        )
    elif spec.kind == "section-w":
        a1, a2 = _section_w_coeffs(spec)
        raw = (
            spec.params["epsilon"] * pts[:, 1]
            + a1 * pts[:, 0] ** 2
            + a2 * pts[:, 1] ** 2
        )
    else:
        m = spec.params["M"]
        if spec.kind == "angular-2d":
            r = np.hypot(pts[:, 0], pts[:, 1])
            theta = np.arctan2(pts[:, 1], pts[:, 0])
        else:
            r = np.linalg.norm(pts, axis=1)
            with np.errstate(invalid="ignore"):
                theta = np.arcsin(np.clip(pts[:, -1] / r, -1.0, 1.0))
        f, _, _ = _f_angular(spec, theta)
        raw = r * f + pts[:, -1] ** 2 / (2 * m * m)
    return spec.scale * raw + spec.offset


def region_mask(spec, pts):
    """Boolean mask of points inside the barrier's validity region.

    quadratic: the strip 0 <= x2 <= rho.  section-w: the claimed section
    box (|x1| and x2 bounded by the frame scales).  angular kinds: the
    wedge theta in [theta0, pi - theta0] (resp. [theta0, pi/2)) inter-
    sected with {v >= xn^2/M^2}, kink margin excluded.  The region uses
    the base parameters; scale and offset do not move it.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    p = spec.params
    if spec.kind == "quadratic":
        return (pts[:, 1] >= -1e-12) & (pts[:, 1] <= p["rho"] + 1e-12)
    if spec.kind == "section-w":
        h = p["h"]
        if "d" in p:
            bx = p["d"][0]
            by = p["d"][1]
        else:
            alpha = p.get("alpha", ALPHA_REF)
            bx = p["C1"] * h ** (alpha / 2)
            by = h**alpha
        return (
            (np.abs(pts[:, 0]) <= bx)
            & (pts[:, 1] >= -1e-12)
            & (pts[:, 1] <= by)
        )
    m = p["M"]
    theta0 = p["theta0"]
    if spec.kind == "angular-2d":
        r = np.hypot(pts[:, 0], pts[:, 1])
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        upper = np.pi - theta0
    else:
        r = np.linalg.norm(pts, axis=1)
        with np.errstate(invalid="ignore"):
            theta = np.arcsin(np.clip(pts[:, -1] / np.where(r > 0, r, 1.0), -1.0, 1.0))
        upper = np.pi / 2
    f, _, _ = _f_angular(spec, theta)
    ok = (r > 0) & (theta >= theta0) & (theta <= upper)
    ok &= np.abs(theta - np.pi / 2) > _KINK_MARGIN
    # {v >= xn^2/M^2}  <=>  r <= 2 M^2 f / sin(theta)^2
    sin2 = np.sin(theta) ** 2
    ok &= r * sin2 <= 2 * m * m * f * (1 + 1e-12)
    return ok


@dataclass(frozen=True)
class SubsolutionReport:
    """Sampled determinant check det D^2 b > Lambda over the region."""

    passed: bool
    lam: float
    min_det: float
    witness: tuple
    n_samples: int
    fd_ok: bool
    fd_max_rel_err: float


@dataclass(frozen=True)
class ComparisonReport:
    """Discrete comparison principle check of barrier vs solution."""

    passed: bool
    min_margin: float
    threshold: float
    witness: tuple
    boundary_points: int
    boundary_min_margin: float


def _sample_region(spec, n, rng):
    p = spec.params
    if spec.kind == "quadratic":
        radius = p.get("radius", 1.0 / p["rho"])
        x1 = rng.uniform(-radius, radius, n)
        x2 = rng.uniform(0.0, p["rho"], n)
        return np.column_stack([x1, x2])
    if spec.kind == "section-w":
        h = p["h"]
        if "d" in p:
            bx, by = p["d"][0], p["d"][1]
        else:
            alpha = p.get("alpha", ALPHA_REF)
            bx = p["C1"] * h ** (alpha / 2)
            by = h**alpha
        x1 = rng.uniform(-bx, bx, n)
        x2 = rng.uniform(0.0, by, n)
        return np.column_stack([x1, x2])
    theta0, m = p["theta0"], p["M"]
    upper = (np.pi - theta0) if spec.kind == "angular-2d" else (np.pi / 2)
    theta = rng.uniform(theta0, upper, n)
    near_kink = np.abs(theta - np.pi / 2) <= _KINK_MARGIN
    while np.any(near_kink):
        theta[near_kink] = rng.uniform(theta0, upper, int(near_kink.sum()))
        near_kink = np.abs(theta - np.pi / 2) <= _KINK_MARGIN
    f, _, _ = _f_angular(spec, theta)
    r_edge = 2 * m * m * f / np.sin(theta) ** 2
    r = r_edge * rng.uniform(0.0, 1.0, n) ** 2
    r = np.maximum(r, 1e-12 * r_edge)
    if spec.kind == "angular-2d":
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    ndim = spec.dim
    pts = np.zeros((n, ndim))
    pts[:, 0] = r * np.cos(theta)
    pts[:, -1] = r * np.sin(theta)
    return pts


def _fd_det(spec, x, step):
    """Hessian determinant by central second differences of the value."""
    ndim = len(x)
    hess = np.empty((ndim, ndim))
    for i in range(ndim):
        ei = np.zeros(ndim)
        ei[i] = step
        vp, _, _ = evaluate(spec, x + ei, check_region=False)
        vm, _, _ = evaluate(spec, x - ei, check_region=False)
        v0, _, _ = evaluate(spec, x, check_region=False)
        hess[i, i] = (vp - 2 * v0 + vm) / step**2
        for j in range(i + 1, ndim):
            ej = np.zeros(ndim)
            ej[j] = step
            vpp, _, _ = evaluate(spec, x + ei + ej, check_region=False)
            vpm, _, _ = evaluate(spec, x + ei - ej, check_region=False)
            vmp, _, _ = evaluate(spec, x - ei + ej, check_region=False)
            vmm, _, _ = evaluate(spec, x - ei - ej, check_region=False)
            hess[i, j] = hess[j, i] = (vpp - vpm - vmp + vmm) / (4 * step**2)
    return float(np.linalg.det(hess))


def verify_subsolution(spec, lam, n_samples=2000, seed=0, fd_points=10):
    """Check det D^2 b > lam on sampled points of the validity region.

    Draws ``n_samples`` (>= 1000) points, records the minimum closed-form
    determinant and its location, and cross-checks the closed form
    against a finite-difference Hessian at ``fd_points`` of the samples
    (step 1e-4 times the point's radius, relative tolerance 1e-3).
    Never raises; failures are carried in the report.
    """
    n_samples = max(int(n_samples), 1000)
    rng = np.random.default_rng(seed)
    pts = _sample_region(spec, n_samples, rng)
    dets = np.empty(n_samples)
    for i, x in enumerate(pts):
        _, _, dets[i] = evaluate(spec, x, check_region=False)
    imin = int(np.argmin(dets))
    min_det = float(dets[imin])

    fd_err = 0.0
    idx = rng.choice(n_samples, size=min(fd_points, n_samples), replace=False)
    for i in idx:
        x = pts[i]
        r = float(np.linalg.norm(x))
        if spec.kind in ("angular-2d", "angular-nd"):
            # Curvature scales like 1/r, so the step must track the radius.
            step = 1e-4 * max(r, 1e-300)
            # Skip a thin wedge at the kink: differencing there is ill
            # conditioned (the angle reconstruction loses a 1/cos(theta)
            # factor), while the closed form stays covered by sampling.
            theta = np.arcsin(np.clip(x[-1] / max(r, 1e-300), -1, 1))
            if abs(theta - np.pi / 2) < max(10 * step / max(r, 1e-300), 0.05):
                continue
        else:
            step = 1e-4 * max(r, 1e-3)
        approx = _fd_det(spec, x, step)
        _, _, exact = evaluate(spec, x, check_region=False)
        fd_err = max(fd_err, abs(approx - exact) / max(abs(exact), 1e-300))
    fd_ok = bool(fd_err <= 1e-3)
    return SubsolutionReport(
        passed=bool(min_det > lam) and fd_ok,
        lam=float(lam),
        min_det=min_det,
        witness=tuple(float(v) for v in pts[imin]),
        n_samples=n_samples,
        fd_ok=fd_ok,
        fd_max_rel_err=float(fd_err),
    )


def _solution_boundary_samples(solution):
    """Cut points of the grid with their imposed boundary values."""
    g = solution.grid
    mask_p = g.nbr_p < 0
    mask_m = g.nbr_m < 0
    pts = np.vstack(
        [g.cut_xy_p[g.cut_id_p[mask_p]], g.cut_xy_m[g.cut_id_m[mask_m]]]
    )
    vals = np.concatenate([solution.bv_p[mask_p], solution.bv_m[mask_m]])
    return pts, vals


def verify_comparison(spec, solution, tol=1e-9):
    """Barrier <= solution on the region boundary forces it inside.

    The comparison region is the part of the grid inside the barrier's
    validity region.  Its discrete boundary consists of the boundary cut
    samples falling in the region plus interior nodes with a stencil
    neighbor outside the region.  Dominance (barrier <= solution value)
    is checked there first; the report then carries the minimum interior
    margin min(u - b), which must exceed -1e-6 * max|u|.

    Raises
    ------
    BoundaryDominanceFails
        If the barrier exceeds the solution's boundary data anywhere on
        the region boundary; the exception carries the witness point.
    """
    g = solution.grid
    nodes = g.nodes
    in_region = region_mask(spec, nodes)

    cut_pts, cut_vals = _solution_boundary_samples(solution)
    cut_in = region_mask(spec, cut_pts)
    b_cut = values(spec, cut_pts[cut_in])
    margins = cut_vals[cut_in] - b_cut
    scale = float(np.abs(solution.values).max())
    bad = margins < -tol * max(scale, 1.0)
    if np.any(bad):
        i = int(np.argmin(margins))
        witness = tuple(float(v) for v in cut_pts[cut_in][i])
        raise BoundaryDominanceFails(
            f"barrier exceeds boundary data by {-float(margins[i]):.3e}",
            witness=witness,
        )

    # Ring nodes: inside the region but with an arm leaving it (or the
    # domain); the solution value itself is the comparison data there.
    neighbor_out = np.zeros(len(nodes), dtype=bool)
    for nbr in (g.nbr_p, g.nbr_m):
        for k in range(nbr.shape[1]):
            col = nbr[:, k]
            has = col >= 0
            neighbor_out[has] |= ~in_region[col[has]]
    ring = in_region & neighbor_out
    n_boundary = int(cut_in.sum() + ring.sum())
    bmin = float(margins.min()) if margins.size else np.inf
    if np.any(ring):
        ring_margin = solution.values[ring] - values(spec, nodes[ring])
        rbad = ring_margin < -tol * max(scale, 1.0)
        if np.any(rbad):
            i = int(np.argmin(ring_margin))
            witness = tuple(float(v) for v in nodes[ring][i])
            raise BoundaryDominanceFails(
                f"barrier exceeds solution on region edge by "
                f"{-float(ring_margin.min()):.3e}",
                witness=witness,
            )
        bmin = min(bmin, float(ring_margin.min()))

    inner = in_region
    margin = solution.values[inner] - values(spec, nodes[inner])
    imin = int(np.argmin(margin))
    threshold = -1e-6 * scale
    return ComparisonReport(
        passed=bool(margin[imin] >= threshold),
        min_margin=float(margin[imin]),
        threshold=float(threshold),
        witness=tuple(float(v) for v in nodes[inner][imin]),
        boundary_points=n_boundary,
        boundary_min_margin=bmin,
    )


def tangent_contradiction_probe(solution, spec=None):
    """inf of u/x2 over nodes with x2 >= 2*spacing.

    A strictly positive return certifies a linear minorant eps*x2, the
    quantity that contradicts tangency of the zero plane at the origin.
    For tangent-normalized output this is at most O(spacing).
    """
    x2 = solution.grid.nodes[:, 1]
    band = x2 >= 2.0 * solution.grid.spacing - 1e-12
    return float(np.min(solution.values[band] / x2[band]))


def sufficient_plane_constant(mu, lam, rho, radius):
    """Smallest practical c_rho making the quadratic kind a lower barrier.

    Ensures b <= 0 on the strip top {x2 = rho} over |x1| <= radius and
    b <= mu*|x|^2 on the rest of the strip.
    """
    return (mu * radius**2 / rho + lam * rho / mu) * (1.0 + 1e-6)


def sufficient_angular_amplitude(theta0, m, lam):
    """Smallest practical C0 with (C0^2+1) sin(theta0)^4 / (2 M^4) > lam."""
    need = 2.0 * lam * m**4 / np.sin(theta0) ** 4 - 1.0
    return math.sqrt(max(need, 0.0)) * (1.0 + 1e-6) + 1e-9


def smallest_dominated_slope(solution, delta):
    """Smallest N with u >= delta*|x1| - N*x2 on all grid nodes.

    The angular argument needs this lower bound as its input; the grid
    realizes it with the reported N.
    """
    nodes = solution.grid.nodes
    x2 = nodes[:, 1]
    used = x2 > 0
    deficit = (delta * np.abs(nodes[used, 0]) - solution.values[used]) / x2[used]
    return float(max(0.0, float(deficit.max())))


def subsolution_report_to_dict(report):
    return {
        "passed": report.passed,
        "lambda": report.lam,
        "min_det": report.min_det,
        "witness": list(report.witness),
        "n_samples": report.n_samples,
        "fd_ok": report.fd_ok,
        "fd_max_rel_err": report.fd_max_rel_err,
    }


def comparison_report_to_dict(report):
    return {
        "passed": report.passed,
        "min_margin": report.min_margin,
        "threshold": report.threshold,
        "witness": list(report.witness),
        "boundary_points": report.boundary_points,
        "boundary_min_margin": report.boundary_min_margin,
    }


def spec_to_dict(spec):
    out = {"kind": spec.kind, "parameters": dict(spec.params)}
    if spec.scale != 1.0:
        out["scale"] = spec.scale
    if spec.offset != 0.0:
        out["offset"] = spec.offset
    return out


def spec_from_dict(data):
    return BarrierSpec(
        kind=data["kind"],
        params=dict(data.get("parameters", {})),
        scale=float(data.get("scale", 1.0)),
        offset=float(data.get("offset", 0.0)),
    )


def load_catalog(path):
    """Read a JSON list of {kind, parameters[, scale, offset]} entries."""
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    return [spec_from_dict(e) for e in entries]


def save_catalog(specs, path):
    payload = [spec_to_dict(s) for s in specs]
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def standard_catalog(mu=1.0, lam=4.0, rho=0.45, radius=1.0):
    """Barriers matched to the catalog problems on the half-disk domain.

    The angular entries use a wide wedge and small M so the sufficient
    amplitude C0 stays moderate; steep amplitudes (C0 above ~20) make
    the exponential span of f too large for finite-difference
    cross-checking even though the closed forms remain valid.
    """
    c_rho = sufficient_plane_constant(mu, lam, rho, radius)
    theta0, m = 1.0, 1.2
    c0 = sufficient_angular_amplitude(theta0, m, lam)
    return [
        BarrierSpec(
            "quadratic",
            {"mu": mu, "Lambda": lam, "c_rho": c_rho, "rho": rho, "radius": radius},
        ),
        BarrierSpec(
            "section-w",
            {"epsilon": 1e-3, "h": 0.01, "Lambda": lam, "C1": 2.0},
        ),
        BarrierSpec(
            "angular-2d",
            {"sigma": 0.1, "C0": c0, "M": m, "theta0": theta0},
        ),
        BarrierSpec(
            "angular-nd",
            {"nu_amp": 0.1, "C0": c0, "M": m, "theta0": theta0, "n": 2},
        ),
    ]
