"""Damped semismooth Newton solver for the discrete Monge-Ampere problem.

The discrete operator at each node is the minimum over orthogonal stencil
pairs of the product of clamped directional second derivatives; the scheme
is monotone (degenerate elliptic), so a discrete comparison principle holds.
Newton uses the argmin-pair generalized Jacobian with a small clamp floor to
stay nonsingular; pseudo-time relaxation serves as a fallback when a Newton
step fails to reduce the residual.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import NoConvergence, NonConvexIterate
from .grid import Grid, build_grid
from .problems import load_problem

_MAX_ITERATIONS = 100_000
_NEWTON_CAP = 200
_RELAX_BURST = 200
_LINE_SEARCH_STEPS = 24


@dataclass
class GridSolution:
    """Discrete solution with its grid, boundary samples, and certificate."""

    grid: Grid
    values: np.ndarray
    bv_p: np.ndarray
    bv_m: np.ndarray
    residual_inf: float
    iterations: int
    converged: bool
    name: str = "problem"
    tangent_slope: float | None = None
    tangent_base: float = 0.0

    def __len__(self):
        return len(self.values)

    @property
    def points(self):
        return self.grid.nodes

    def ma_values(self):
        g = self.grid
        ma, _, _, _ = kernels.ma_operator(
            self.values, g.nbr_p, g.nbr_m, self.bv_p, self.bv_m, g.wp, g.wm,
            g.pairs[:, 0].copy(), g.pairs[:, 1].copy(),
        )
        return ma

    def second_differences(self):
        g = self.grid
        return kernels.second_differences(
            self.values, g.nbr_p, g.nbr_m, self.bv_p, self.bv_m, g.wp, g.wm
        )


def ma_residual(solution, spec):
    """MA_W[u] - f at every interior node."""
    f = spec.f_at(solution.grid.nodes)
    return solution.ma_values() - f


def convexity_check(solution):
    """Worst raw directional second difference (positive for convex u).

    The raw convention multiplies the second derivative along e by
    (|e| h_g)^2, so for u = |x|^2 the minimum equals 2 h_g^2 over the axis
    directions.
    """
    g = solution.grid
    d2 = solution.second_differences()
    lengths2 = (g.dirs[:, 0].astype(float) ** 2 + g.dirs[:, 1] ** 2) * g.spacing**2
    raw = d2 * lengths2
    return float(raw.min())


def _poisson_init(grid, bv_p, bv_m, f):
    """Solve the linearized initializer: Laplacian u = 2 sqrt(f)."""
    ix, iy = grid.axis_direction_indices()
    n = len(grid)
    rows, cols, vals = [], [], []
    rhs = 2.0 * np.sqrt(f)
    diag = np.zeros(n)
    idx = np.arange(n)
    for d in (ix, iy):
        for nbr, bv, w in (
            (grid.nbr_p[:, d], bv_p[:, d], grid.wp[:, d]),
            (grid.nbr_m[:, d], bv_m[:, d], grid.wm[:, d]),
        ):
            diag -= w
            interior = nbr >= 0
            rows.append(idx[interior])
            cols.append(nbr[interior])
            vals.append(w[interior])
            rhs[~interior] -= w[~interior] * bv[~interior]
    rows.append(idx)
    cols.append(idx)
    vals.append(diag)
    a = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return spla.splu(a).solve(rhs)


def _newton_matrix(grid, ka, kb, coef_a, coef_b):
    """Jacobian at the iterate: coef_a multiplies the second-difference row
    along pair member a (a column of directions selected per node), coef_b
    the row along member b."""
    n = len(grid)
    idx = np.arange(n)
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    for dsel, coef in ((ka, coef_a), (kb, coef_b)):
        wp_s = grid.wp[idx, dsel]
        wm_s = grid.wm[idx, dsel]
        diag -= coef * (wp_s + wm_s)
        for nbr_all, w in ((grid.nbr_p, wp_s), (grid.nbr_m, wm_s)):
            nbr = nbr_all[idx, dsel]
            interior = nbr >= 0
            rows.append(idx[interior])
            cols.append(nbr[interior])
            vals.append((coef * w)[interior])
    rows.append(idx)
    cols.append(idx)
    vals.append(diag)
    return sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )


def _smoothed_operator(grid, d2, delta):
    """Min-smoothed operator: factors floored at delta plus a linear penalty
    delta*min(d2 - delta, 0) per factor, so the operator stays uniformly
    monotone (slope >= delta) on the non-convex set while agreeing with the
    clamped product wherever both second differences exceed delta."""
    pa = grid.pairs[:, 0]
    pb = grid.pairs[:, 1]
    da = d2[:, pa]
    db = d2[:, pb]
    vals = np.maximum(da, delta) * np.maximum(db, delta)
    vals += delta * (np.minimum(da - delta, 0.0) + np.minimum(db - delta, 0.0))
    pidx = np.argmin(vals, axis=1)
    rows = np.arange(len(vals))
    m = vals[rows, pidx]
    da_s = da[rows, pidx]
    db_s = db[rows, pidx]
    coef_a = np.where(da_s > delta, np.maximum(db_s, delta), delta)
    coef_b = np.where(db_s > delta, np.maximum(da_s, delta), delta)
    return m, pidx, coef_a, coef_b


def _interpolate_values(prev, points):
    """Sample a previous solution at new node positions.

    Same-node grids (stencil widening) reuse values directly; otherwise
    linear interpolation over the previous nodes and boundary cut samples,
    with nearest-sample fallback for points outside their hull.
    """
    from scipy.interpolate import LinearNDInterpolator, NearestNDInterpolator

    pg = prev.grid
    if len(pg.nodes) == len(points) and np.array_equal(pg.nodes, points):
        return prev.values.copy()
    pts = [pg.nodes]
    vals = [prev.values]
    for nbr, cid, xy, bv in (
        (pg.nbr_p, pg.cut_id_p, pg.cut_xy_p, prev.bv_p),
        (pg.nbr_m, pg.cut_id_m, pg.cut_xy_m, prev.bv_m),
    ):
        cut = nbr < 0
        pts.append(xy[cid[cut]])
        vals.append(bv[cut])
    pts = np.vstack(pts)
    vals = np.concatenate(vals)
    u = LinearNDInterpolator(pts, vals)(points)
    miss = ~np.isfinite(u)
    if np.any(miss):
        u[miss] = NearestNDInterpolator(pts, vals)(points[miss])
    return u


def solve(spec, spacing, width=2, tol=1e-9, check_convexity=True, strict=True, initial=None):
    """Solve det D^2 u = f on spec's domain with Dirichlet data spec.boundary.

    Parameters
    ----------
    spec : ProblemSpec
    spacing : float
        Grid spacing (<= rho/8).
    width : int
        Stencil width in [2, 8].
    tol : float
        Max-norm residual target, in [1e-12, 1e-4].
    check_convexity : bool
        Verify discrete convexity of the accepted iterate (repairing by
        relaxation if needed).
    strict : bool
        Raise NoConvergence at the iteration cap; if False, return the best
        iterate flagged ``converged=False``.
    initial : GridSolution, optional
        Warm start: a solution of the same problem (any grid or width)
        whose values are interpolated onto the new grid in place of the
        Poisson initializer.  Cuts the iteration count sharply when
        refining a coarse solve or widening the stencil.

    Returns
    -------
    GridSolution
    """
    if not 1e-12 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-12, 1e-4]")
    grid = build_grid(spec.domain, spacing, width)
    f = spec.f_at(grid.nodes)
    bv_p, bv_m = grid.boundary_values(spec.boundary)
    pa = np.ascontiguousarray(grid.pairs[:, 0])
    pb = np.ascontiguousarray(grid.pairs[:, 1])

    def operator(u):
        return kernels.ma_operator(u, grid.nbr_p, grid.nbr_m, bv_p, bv_m, grid.wp, grid.wm, pa, pb)

    def second_diffs(u):
        return kernels.second_differences(u, grid.nbr_p, grid.nbr_m, bv_p, bv_m, grid.wp, grid.wm)

    jac_floor = max(1e-8, 1e-6 * np.sqrt(spec.lam * spec.Lam))
    sqrt_lam = np.sqrt(spec.lam)
    best = {"u": None, "r": np.inf}

    def note_best(u, r):
        if r < best["r"]:
            best["u"], best["r"] = u.copy(), r

    def exact_newton(u, iterations, budget, use_relax, dt):
        """Newton on the clamped operator with a floored argmin-pair
        Jacobian; optional chunked pseudo-time fallback (reverting and
        shrinking dt when the residual grows, since cut arms make the
        explicit step conditionally stable at best). Without the fallback
        the loop exits on the first stalled line search so the caller can
        escalate to continuation."""
        ma, pidx, fa, fb = operator(u)
        res = ma - f
        r = float(np.abs(res).max())
        merit = float(res @ res)
        note_best(u, r)
        while r > tol and iterations < budget:
            jac = _newton_matrix(
                grid,
                grid.pairs[pidx, 0],
                grid.pairs[pidx, 1],
                np.maximum(fb, jac_floor),
                np.maximum(fa, jac_floor),
            )
            try:
                du = spla.splu(jac).solve(-res)
            except RuntimeError:
                du = None
            accepted = False
            if du is not None and np.all(np.isfinite(du)):
                alpha = 1.0
                for _ in range(_LINE_SEARCH_STEPS):
                    trial = u + alpha * du
                    ma_t, pidx_t, fa_t, fb_t = operator(trial)
                    res_t = ma_t - f
                    merit_t = float(res_t @ res_t)
                    if merit_t < merit * (1.0 - 1e-4 * alpha):
                        u, ma, pidx, fa, fb, res = trial, ma_t, pidx_t, fa_t, fb_t, res_t
                        r = float(np.abs(res).max())
                        merit = merit_t
                        accepted = True
                        break
                    alpha *= 0.5
            iterations += 1
            if not accepted:
                if not use_relax:
                    break
                chunk = 20
                for _ in range(_RELAX_BURST // chunk):
                    trial = kernels.relax(
                        u, grid.nbr_p, grid.nbr_m, bv_p, bv_m, grid.wp, grid.wm,
                        pa, pb, f, dt, chunk,
                    )
                    ma_t, pidx_t, fa_t, fb_t = operator(trial)
                    res_t = ma_t - f
                    merit_t = float(res_t @ res_t)
                    iterations += chunk
                    if merit_t < merit:
                        u, ma, pidx, fa, fb, res = trial, ma_t, pidx_t, fa_t, fb_t, res_t
                        r = float(np.abs(res).max())
                        merit = merit_t
                    else:
                        dt *= 0.5
            note_best(u, r)
        return u, r, iterations, dt

    if initial is not None:
        u = _interpolate_values(initial, grid.nodes)
    else:
        u = _poisson_init(grid, bv_p, bv_m, f)
    dt = grid.spacing**2 / 8.0
    u, r, iterations, dt = exact_newton(u, 0, min(40, _MAX_ITERATIONS), False, dt)

    if r > tol and iterations < _MAX_ITERATIONS:
        # The exact operator is flat on the clamped set, which can strand
        # Newton when the initializer is far from discrete convexity.
        # Continuation: Newton on the uniformly monotone smoothed operator
        # walks the iterate into the convex basin, tightening delta until
        # the exact operator takes over.
        delta = 0.5 * sqrt_lam
        while r > tol and delta >= 1e-6 * sqrt_lam and iterations < _MAX_ITERATIONS // 2:
            target = max(tol, 0.05 * delta * np.sqrt(spec.Lam))
            m_s, pidx_s, coef_a, coef_b = _smoothed_operator(grid, second_diffs(u), delta)
            res_s = m_s - f
            merit_s = float(res_s @ res_s)
            for _ in range(_NEWTON_CAP):
                if float(np.abs(res_s).max()) <= target:
                    break
                jac = _newton_matrix(
                    grid, grid.pairs[pidx_s, 0], grid.pairs[pidx_s, 1], coef_a, coef_b
                )
                try:
                    du = spla.splu(jac).solve(-res_s)
                except RuntimeError:
                    break
                if not np.all(np.isfinite(du)):
                    break
                alpha, accepted = 1.0, False
                for _ in range(_LINE_SEARCH_STEPS):
                    trial = u + alpha * du
                    m_t, pidx_t, ca_t, cb_t = _smoothed_operator(grid, second_diffs(trial), delta)
                    res_t = m_t - f
                    merit_t = float(res_t @ res_t)
                    if merit_t < merit_s * (1.0 - 1e-4 * alpha):
                        u, m_s, pidx_s, coef_a, coef_b = trial, m_t, pidx_t, ca_t, cb_t
                        res_s, merit_s = res_t, merit_t
                        accepted = True
                        break
                    alpha *= 0.5
                iterations += 1
                if not accepted:
                    break
            delta /= 8.0
            ma, pidx, fa, fb = operator(u)
            res = ma - f
            r = float(np.abs(res).max())
            note_best(u, r)

        u, r, iterations, dt = exact_newton(u, iterations, _MAX_ITERATIONS, True, dt)

    if r > best["r"]:
        u, r = best["u"], best["r"]

    converged = r <= tol
    solution = GridSolution(
        grid=grid,
        values=u,
        bv_p=bv_p,
        bv_m=bv_m,
        residual_inf=r,
        iterations=iterations,
        converged=bool(converged),
        name=spec.name,
    )
    if not converged and strict:
        err = NoConvergence(
            f"residual {r:.3e} above tol {tol:.3e} after {iterations} iterations"
        )
        err.best = solution
        raise err
    if check_convexity:
        tol_convex = 1e-9 * max(1.0, float(np.abs(u).max()))
        for _ in range(3):
            if convexity_check(solution) >= -tol_convex:
                break
            repaired = kernels.relax(
                solution.values, grid.nbr_p, grid.nbr_m, bv_p, bv_m, grid.wp, grid.wm,
                pa, pb, f, dt, _RELAX_BURST,
            )
            solution = replace(solution, values=repaired)
        else:
            raise NonConvexIterate(
                f"worst raw second difference {convexity_check(solution):.3e}"
            )
    return solution


def save_solution(solution, out_dir):
    """Write solution.csv (x1, x2, u) and a JSON sidecar into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "solution.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "u"])
        for (x1, x2), val in zip(solution.grid.nodes, solution.values):
            writer.writerow([f"{x1:.17g}", f"{x2:.17g}", f"{val:.17g}"])
    sidecar = {
        "spacing": solution.grid.spacing,
        "width": solution.grid.width,
        "residual_inf": solution.residual_inf,
        "iterations": solution.iterations,
    }
    with open(os.path.join(out_dir, "solution.json"), "w") as fh:
        json.dump(sidecar, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return csv_path


def load_solution(in_dir):
    """Rebuild a GridSolution from a directory written by the solve command.

    Requires problem.json, solution.csv, and solution.json side by side; the
    grid is rebuilt deterministically from the problem and sidecar.
    """
    spec = load_problem(os.path.join(in_dir, "problem.json"))
    with open(os.path.join(in_dir, "solution.json")) as fh:
        side = json.load(fh)
    data = np.genfromtxt(os.path.join(in_dir, "solution.csv"), delimiter=",", skip_header=1)
    grid = build_grid(spec.domain, side["spacing"], side["width"])
    if len(grid) != len(data):
        raise ValueError("solution.csv does not match the rebuilt grid")
    if not np.allclose(grid.nodes, data[:, :2], atol=1e-12):
        raise ValueError("node coordinates in solution.csv do not match the grid")
    bv_p, bv_m = grid.boundary_values(spec.boundary)
    return (
        GridSolution(
            grid=grid,
            values=np.ascontiguousarray(data[:, 2]),
            bv_p=bv_p,
            bv_m=bv_m,
            residual_inf=float(side["residual_inf"]),
            iterations=int(side["iterations"]),
            converged=True,
            name=spec.name,
        ),
        spec,
    )
