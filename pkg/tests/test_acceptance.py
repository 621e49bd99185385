"""End-to-end acceptance checks.

One test per criterion, named test_criterion_XX_*, so a verbose run
prints one pass/fail line for each.  Every numerical tolerance is stated
inline next to its assertion.  The solve/sweep fixtures are session
scoped; the whole module runs in a few minutes, dominated by the
1/256-grid solves of criterion 1.
"""

from dataclasses import replace

import numpy as np
import pytest

from masections.barriers import (
    BarrierSpec,
    evaluate,
    standard_catalog,
    sufficient_plane_constant,
    verify_comparison,
    verify_subsolution,
)
from masections.errors import BoundaryDominanceFails
from masections.geometry import mvee
from masections.problems import (
    BoundaryData,
    ProblemSpec,
    half_disk_domain,
    make_standard_problem,
)
from masections.sections import (
    SlidingMap,
    b_value,
    extract_section,
    graph_growth_margins,
    map_section,
    sliding_map,
    tangent_normalize,
)
from masections.solver import solve
from masections.sweep import (
    check_nu_drift,
    emit,
    fit_volume_exponent,
    report_payload,
    run_sweep,
)

PROBLEM_NAMES = (
    "radial",
    "sheared",
    "constant-bdry",
    "random-polygon-0",
    "random-polygon-1",
    "random-polygon-2",
    "random-polygon-3",
    "random-polygon-4",
)


def _check(label, ok, detail):
    print(f"{label}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{label}: {detail}"


def _exact_radial(pts):
    return (pts**2).sum(axis=1)


def _exact_sheared(pts):
    return pts[:, 0] ** 2 + (pts[:, 0] + pts[:, 1]) ** 2


@pytest.fixture(scope="session")
def solves():
    """Raw and normalized accepted solves at the acceptance grids.

    Sheared runs at width 4 (warm started from width 2) because its
    anisotropic Hessian needs the richer direction set; the others use
    width 2.  The width-2 sheared solve is kept for warm starts in
    criterion 1.
    """
    out = {}
    for name in PROBLEM_NAMES:
        problem = make_standard_problem(name)
        if name == "sheared":
            s2 = solve(problem, 1 / 128, width=2, tol=1e-8)
            raw = solve(problem, 1 / 128, width=4, tol=1e-8, initial=s2)
            out["_sheared-w2"] = s2
        elif name == "constant-bdry":
            raw = solve(problem, 1 / 256, width=2, tol=1e-8)
        else:
            raw = solve(problem, 1 / 128, width=2, tol=1e-8)
        normalized = tangent_normalize(raw, base=problem.boundary.base)
        out[name] = (problem, raw, normalized)
    return out


@pytest.fixture(scope="session")
def reports(solves):
    """Eight-level section ladders for every accepted problem."""
    out = {}
    for name in PROBLEM_NAMES:
        problem, raw, _ = solves[name]
        h_max = 1 / 32 if name == "constant-bdry" else 1 / 8
        report = run_sweep(problem, h_max=h_max, levels=8, solution=raw)
        assert report.error is None, f"{name} sweep stopped: {report.error}"
        assert len(report.rows) == 8
        out[name] = report
    return out


class TestCriterion01SolverOracles:
    def test_criterion_01_solver_oracle_equivalence(self, solves):
        # Levels at spacing 1/256 against the exact solutions.
        radial, r128, _ = solves["radial"]
        r256 = solve(radial, 1 / 256, width=2, tol=1e-8)
        err_r256 = float(np.abs(r256.values - _exact_radial(r256.grid.nodes)).max())
        _check("criterion 1 radial level", err_r256 <= 5e-3, f"err {err_r256:.3e} <= 5e-3 at 1/256")

        sheared, s128w4, _ = solves["sheared"]
        s256 = solve(sheared, 1 / 256, width=2, tol=1e-8, initial=solves["_sheared-w2"])
        err_s256 = float(np.abs(s256.values - _exact_sheared(s256.grid.nodes)).max())
        _check("criterion 1 sheared level", err_s256 <= 2e-2, f"err {err_s256:.3e} <= 2e-2 at 1/256")

        # Halving for radial: the min-over-pairs operator is exact on
        # quadratics, so both errors sit at the cut-weight roundoff floor
        # and the reduction-factor clause is met as error <= 1e-9.
        err_r128 = float(np.abs(r128.values - _exact_radial(r128.grid.nodes)).max())
        radial_ok = (err_r128 <= 1e-9 and err_r256 <= 1e-9) or err_r128 / err_r256 >= 1.8
        _check(
            "criterion 1 radial halving",
            radial_ok,
            f"1/128 err {err_r128:.3e}, 1/256 err {err_r256:.3e} (machine floor)",
        )

        # Halving for sheared couples spacing with stencil width: fixed
        # width leaves the directional resolution term in place, so the
        # 1/64 -> 1/128 step also refines width 4 -> 8.
        s64 = solve(sheared, 1 / 64, width=2, tol=1e-8)
        s64w4 = solve(sheared, 1 / 64, width=4, tol=1e-8, initial=s64)
        e_coarse = float(np.abs(s64w4.values - _exact_sheared(s64w4.grid.nodes)).max())
        s128w8 = solve(sheared, 1 / 128, width=8, tol=1e-8, initial=s128w4)
        e_fine = float(np.abs(s128w8.values - _exact_sheared(s128w8.grid.nodes)).max())
        factor = e_coarse / e_fine
        _check(
            "criterion 1 sheared halving",
            factor >= 1.8,
            f"err {e_coarse:.3e} -> {e_fine:.3e}, factor {factor:.1f} >= 1.8",
        )


class TestCriterion02Comparison:
    def test_criterion_02_discrete_comparison_principle(self):
        rng = np.random.default_rng(77)
        dom = half_disk_domain()
        worst = -np.inf
        for k in range(20):
            a, c = rng.uniform(0.8, 1.4, 2)
            da, dc, _ = rng.uniform(0.0, 0.6, 3)
            f = {"type": "constant", "value": float(rng.uniform(1.0, 6.0))}
            pair = []
            for coeffs in ([a, 0.0, c], [a + da, 0.0, c + dc]):
                spec = ProblemSpec(
                    domain=dom,
                    f=f,
                    lam=1.0,
                    Lam=6.0,
                    boundary=BoundaryData({"type": "quadratic", "coeffs": coeffs}, mu=0.5),
                    name=f"pair-{k}",
                )
                pair.append(solve(spec, 1 / 32, width=2, tol=1e-9))
            worst = max(worst, float((pair[0].values - pair[1].values).max()))
        _check("criterion 2", worst <= 1e-8, f"20 ordered pairs, max(u1-u2) {worst:.3e} <= 1e-8")


class TestCriterion03Sandwich:
    def test_criterion_03_section_ellipsoid_sandwich(self, reports):
        worst_ratio = 0.0
        worst_var = 0.0
        for name, report in reports.items():
            ratios = [row.k_out / row.k_in for row in report.rows]
            worst_ratio = max(worst_ratio, max(ratios))
            worst_var = max(worst_var, max(ratios) / min(ratios))
        ok = worst_ratio <= 3.0 and worst_var <= 1.5
        _check(
            "criterion 3",
            ok,
            f"max k_out/k_in {worst_ratio:.3f} <= 3, max ladder variation {worst_var:.3f} <= 1.5",
        )


class TestCriterion04VolumeScaling:
    def test_criterion_04_volume_scaling(self, reports):
        exponents = {}
        k0_floor = np.inf
        for name, report in reports.items():
            exponents[name] = fit_volume_exponent(report)
            k0 = report_payload(report)["constants"]["k0"]
            k0_floor = min(k0_floor, k0)
            for row in report.rows:
                assert k0 * row.h <= row.area <= row.h / k0
        off = max(abs(e - 1.0) for e in exponents.values())
        ok = off <= 0.05 and k0_floor >= 0.1
        detail = ", ".join(f"{n} {e:.3f}" for n, e in exponents.items())
        _check("criterion 4", ok, f"exponents ({detail}) within 1+-0.05; k0 >= {k0_floor:.3f}")


class TestCriterion05Sliding:
    def test_criterion_05_sliding_diagnostics(self, reports):
        nu_radial = max(abs(row.nu1) for row in reports["radial"].rows)
        nu_sheared = max(abs(row.nu1 + 0.5) for row in reports["sheared"].rows)
        drift_fail = [n for n, r in reports.items() if not check_nu_drift(r).passed]
        ok = nu_radial <= 0.02 and nu_sheared <= 0.02 and not drift_fail
        _check(
            "criterion 5",
            ok,
            f"radial |nu| {nu_radial:.4f} <= 0.02, sheared |nu+1/2| {nu_sheared:.4f} <= 0.02, "
            f"drift failures {drift_fail or 'none'}",
        )


class TestCriterion06BCalculus:
    def test_criterion_06_b_levels_and_monotonicity(self, reports):
        b_rad = [row.b for row in reports["radial"].rows]
        b_she = [row.b for row in reports["sheared"].rows]
        lev_ok = max(abs(b - 1.0) for b in b_rad) <= 0.03 and max(
            abs(b - np.sqrt(2.0)) for b in b_she
        ) <= 0.03
        mono_ok = True
        floor = np.inf
        for report in reports.values():
            rows = report.rows
            floor = min(floor, min(row.b for row in rows))
            for i in range(len(rows)):
                for j in range(i + 1, len(rows)):
                    hi, hj = rows[i].h, rows[j].h  # hi > hj
                    q = rows[j].b / rows[i].b
                    lo = np.sqrt(hj / hi) * (1 - 1e-9)
                    up = np.sqrt(hi / hj) * (1 + 1e-9)
                    mono_ok = mono_ok and lo <= q <= up
        ok = lev_ok and mono_ok and floor >= 0.1
        _check(
            "criterion 6 levels",
            ok,
            f"radial b in [{min(b_rad):.4f},{max(b_rad):.4f}] ~ 1, sheared in "
            f"[{min(b_she):.4f},{max(b_she):.4f}] ~ sqrt2, monotone pairs {mono_ok}, "
            f"b floor {floor:.3f} >= 0.1",
        )

    def test_criterion_06_b_transform_properties(self, solves):
        problem, _, normalized = solves["sheared"]
        base1 = extract_section(normalized, 0.04, boundary=problem.boundary)
        base2 = extract_section(normalized, 0.01, boundary=problem.boundary)

        slid = map_section(base2, SlidingMap(0.7).matrix)
        d_slide = abs(b_value(slid) - b_value(base2))

        L = np.array([[1.3, 0.4], [0.0, 0.8]])
        q_before = b_value(base1) / b_value(base2)
        q_after = b_value(map_section(base1, L)) / b_value(map_section(base2, L))
        d_quot = abs(q_after - q_before)

        beta = 2.5
        scaled_sol = replace(
            normalized,
            values=beta * normalized.values,
            bv_p=beta * normalized.bv_p,
            bv_m=beta * normalized.bv_m,
        )
        plain = extract_section(normalized, 0.01, boundary=None)
        scaled = extract_section(scaled_sol, beta * 0.01, boundary=None)
        d_beta = abs(b_value(scaled) - b_value(plain) / np.sqrt(beta))

        ok = d_slide <= 1e-10 and d_quot <= 1e-8 and d_beta <= 1e-10
        _check(
            "criterion 6 transforms",
            ok,
            f"sliding {d_slide:.1e} <= 1e-10, quotient {d_quot:.1e} <= 1e-8, "
            f"beta-scaling {d_beta:.1e} <= 1e-10",
        )


class TestCriterion07CentroidAndGrowth:
    def test_criterion_07_centroid_offset_and_graph_growth(self, solves, reports):
        worst_rel = 0.0
        for report in reports.values():
            for row in report.rows:
                worst_rel = max(worst_rel, row.centroid_offset / np.sqrt(row.h))
        margins_ok = True
        for name in PROBLEM_NAMES:
            problem, _, normalized = solves[name]
            section = extract_section(normalized, 0.01, boundary=problem.boundary)
            sliding = sliding_map(section)
            result = graph_growth_margins(
                normalized, section, sliding, problem.boundary.mu, problem.boundary
            )
            margins_ok = margins_ok and result["ok"]
        ok = worst_rel <= 1e-6 and margins_ok
        _check(
            "criterion 7",
            ok,
            f"max offset/sqrt(h) {worst_rel:.2e} <= 1e-6, graph growth bounds hold: {margins_ok}",
        )


class TestCriterion08Barriers:
    def test_criterion_08_barrier_suite(self, solves):
        # Quadratic determinant is 4*Lambda identically.
        quad = standard_catalog()[0]
        lam = quad.params["Lambda"]
        rng = np.random.default_rng(5)
        pts = np.column_stack([rng.uniform(-1, 1, 50), rng.uniform(0, 0.45, 50)])
        dets = np.array([evaluate(quad, x)[2] for x in pts])
        quad_ok = np.abs(dets / (4 * lam) - 1.0).max() <= 1e-12

        # Angular-2d: finite differences at 100 points and the closed form.
        ang = next(s for s in standard_catalog() if s.kind == "angular-2d")
        rep = verify_subsolution(ang, 4.0, fd_points=100)
        sig, c0, m = (ang.params[k] for k in ("sigma", "C0", "M"))
        closed_ok = True
        for _ in range(100):
            theta = rng.uniform(ang.params["theta0"] + 0.01, np.pi / 2 - 0.01)
            r = rng.uniform(0.05, 2.0)
            x = [r * np.cos(theta), r * np.sin(theta)]
            _, _, det = evaluate(ang, x, check_region=False)
            f = sig * np.exp(c0 * (np.pi / 2 - theta))
            want = (c0**2 + 1) * (f / r) * np.sin(theta) ** 2 / m**2
            closed_ok = closed_ok and abs(det / want - 1.0) <= 1e-12
        ang_ok = rep.passed and rep.fd_max_rel_err <= 1e-3 and closed_ok

        # angular-nd at n = 2 collapses to the planar formula.
        nd = next(s for s in standard_catalog() if s.kind == "angular-nd")
        flat = BarrierSpec(
            "angular-2d",
            {
                "sigma": nd.params["nu_amp"],
                "C0": nd.params["C0"],
                "M": nd.params["M"],
                "theta0": nd.params["theta0"],
            },
        )
        reduce_ok = True
        for _ in range(50):
            theta = rng.uniform(nd.params["theta0"] + 0.01, np.pi / 2 - 0.01)
            r = rng.uniform(0.05, 2.0)
            x = [r * np.cos(theta), r * np.sin(theta)]
            v1, _, d1 = evaluate(flat, x, check_region=False)
            v2, _, d2 = evaluate(nd, x, check_region=False)
            reduce_ok = reduce_ok and abs(v1 - v2) <= 1e-12 * max(1, abs(v1))
            reduce_ok = reduce_ok and abs(d1 - d2) <= 1e-12 * max(1, abs(d1))

        # Comparison principle for the strip barrier on every accepted
        # solve, plus the scaled-up negative control.
        comp_fail = []
        for name in PROBLEM_NAMES:
            problem, _, normalized = solves[name]
            lo, hi = problem.domain.bounding_box()
            radius = max(abs(lo[0]), abs(hi[0]))
            mu = problem.boundary.mu
            rho = problem.domain.rho
            spec = BarrierSpec(
                "quadratic",
                {
                    "mu": mu,
                    "Lambda": problem.Lam,
                    "c_rho": sufficient_plane_constant(mu, problem.Lam, rho, radius),
                    "rho": rho,
                    "radius": radius,
                },
            )
            try:
                if not verify_comparison(spec, normalized).passed:
                    comp_fail.append(name)
            except BoundaryDominanceFails:
                comp_fail.append(name)
        control = replace(standard_catalog()[0], scale=10.0)
        with pytest.raises(BoundaryDominanceFails):
            verify_comparison(control, solves["radial"][2])

        ok = quad_ok and ang_ok and reduce_ok and not comp_fail
        _check(
            "criterion 8",
            ok,
            f"quad det 4L rel<=1e-12: {quad_ok}; angular fd {rep.fd_max_rel_err:.1e} <= 1e-3, "
            f"closed form: {closed_ok}; nd->2d: {reduce_ok}; comparisons fail: {comp_fail or 'none'}; "
            "negative control raised",
        )


class TestCriterion09Mvee:
    def test_criterion_09_mvee_correctness(self):
        corners = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
        radii, _ = mvee(corners).semi_axes()
        circle_err = float(np.abs(radii - np.sqrt(2.0)).max())

        theta = np.linspace(0.0, 2 * np.pi, 257)[:-1]
        a, b, psi = 0.8, 0.3, 0.4
        rot = np.array([[np.cos(psi), -np.sin(psi)], [np.sin(psi), np.cos(psi)]])
        pts = np.column_stack([a * np.cos(theta), b * np.sin(theta)]) @ rot.T
        axes = np.sort(mvee(pts).semi_axes()[0])
        axes_err = float(np.abs(axes / np.array([b, a]) - 1.0).max())

        ok = circle_err <= 1e-4 and axes_err <= 0.01
        _check(
            "criterion 9",
            ok,
            f"square corner radius err {circle_err:.2e} <= 1e-4, ellipse axes err "
            f"{axes_err:.2%} <= 1%",
        )


class TestCriterion10Determinism:
    def test_criterion_10_byte_identical_reports(self, tmp_path):
        problem = make_standard_problem("constant-bdry")
        payloads = []
        for tag in ("a", "b"):
            report = run_sweep(problem, spacing=1 / 32, width=2, tol=1e-8)
            _, json_path = emit(report, tmp_path / tag)
            payloads.append(json_path.read_bytes())
        ok = payloads[0] == payloads[1]
        _check("criterion 10", ok, f"two sweep runs, report.json {len(payloads[0])} bytes, identical")
