"""Barrier tests: closed-form determinants against symbolic and
finite-difference oracles, subsolution sampling, comparison verification
against solved problems, and the tangency probe."""

from dataclasses import replace

import numpy as np
import pytest

from masections.barriers import (
    BarrierSpec,
    ComparisonReport,
    SubsolutionReport,
    evaluate,
    load_catalog,
    save_catalog,
    smallest_dominated_slope,
    standard_catalog,
    sufficient_angular_amplitude,
    sufficient_plane_constant,
    tangent_contradiction_probe,
    verify_comparison,
    verify_subsolution,
)
from masections.errors import (
    BoundaryDominanceFails,
    KinkPoint,
    OutsideRegion,
    UnknownName,
)
from masections.grid import build_grid
from masections.problems import half_disk_domain, make_standard_problem
from masections.solver import GridSolution, solve


def _angular(sigma=0.1, c0=5.0, m=2.0, theta0=0.3):
    return BarrierSpec(
        "angular-2d", {"sigma": sigma, "C0": c0, "M": m, "theta0": theta0}
    )


def _quadratic(mu=1.0, lam=2.0, c_rho=5.0, rho=0.45):
    return BarrierSpec(
        "quadratic", {"mu": mu, "Lambda": lam, "c_rho": c_rho, "rho": rho}
    )


@pytest.fixture(scope="module")
def radial_solution():
    spec = make_standard_problem("radial")
    return solve(spec, 1 / 64, width=2, tol=1e-9)


class TestEvaluate:
    def test_quadratic_det_constant(self):
        spec = _quadratic(mu=1.0, lam=2.0)
        rng = np.random.default_rng(3)
        dets = [
            evaluate(spec, x)[2]
            for x in np.column_stack(
                [rng.uniform(-1, 1, 50), rng.uniform(0, 0.45, 50)]
            )
        ]
        assert np.ptp(dets) == 0.0
        assert dets[0] == pytest.approx(8.0, rel=1e-12)

    def test_quadratic_value_gradient(self):
        spec = _quadratic(mu=1.5, lam=3.0, c_rho=2.0)
        v, g, _ = evaluate(spec, [0.2, 0.1])
        assert v == pytest.approx(1.5 * 0.04 + 2.0 * 0.01 - 0.2, rel=1e-14)
        assert g[0] == pytest.approx(3.0 * 0.2, rel=1e-14)
        assert g[1] == pytest.approx(4.0 * 0.1 - 2.0, rel=1e-14)

    def test_angular_closed_form_point(self):
        sigma, c0, m = 0.1, 5.0, 2.0
        spec = _angular(sigma, c0, m)
        r, theta = 0.5, np.pi / 4
        x = [r * np.cos(theta), r * np.sin(theta)]
        _, _, det = evaluate(spec, x, check_region=False)
        f = sigma * np.exp(c0 * (np.pi / 2 - theta))
        expect = (c0**2 + 1) * (f / r) * np.sin(theta) ** 2 / m**2
        assert det == pytest.approx(expect, rel=1e-12)

    def test_angular_matches_symbolic_hessian(self):
        import sympy as sp

        sigma, c0, m = 0.1, 5.0, 2.0
        spec = _angular(sigma, c0, m)
        x, y = sp.symbols("x y", positive=True)
        r = sp.sqrt(x**2 + y**2)
        theta = sp.atan2(y, x)
        v = r * sigma * sp.exp(c0 * (sp.pi / 2 - theta)) + y**2 / (2 * m**2)
        det_expr = sp.hessian(v, (x, y)).det()
        det_fn = sp.lambdify((x, y), det_expr, "numpy")
        rng = np.random.default_rng(11)
        for _ in range(20):
            th = rng.uniform(0.35, np.pi / 2 - 0.05)
            rr = rng.uniform(0.3, 3.0)
            pt = (rr * np.cos(th), rr * np.sin(th))
            _, _, det = evaluate(spec, pt, check_region=False)
            assert det == pytest.approx(float(det_fn(*pt)), rel=1e-10)

    def test_angular_homogeneity_in_r(self):
        spec = _angular()
        x = np.array([0.3, 0.4])
        _, _, d1 = evaluate(spec, x, check_region=False)
        _, _, d2 = evaluate(spec, 2 * x, check_region=False)
        assert d2 / d1 == pytest.approx(0.5, abs=1e-10)

    def test_nd_reduces_to_2d(self):
        common = {"C0": 5.0, "M": 2.0, "theta0": 0.3}
        flat = BarrierSpec("angular-2d", {"sigma": 0.1, **common})
        deep = BarrierSpec("angular-nd", {"nu_amp": 0.1, "n": 2, **common})
        rng = np.random.default_rng(4)
        for _ in range(20):
            th = rng.uniform(0.35, np.pi / 2 - 0.01)
            rr = rng.uniform(0.1, 2.0)
            pt = [rr * np.cos(th), rr * np.sin(th)]
            v1, g1, d1 = evaluate(flat, pt, check_region=False)
            v2, g2, d2 = evaluate(deep, pt, check_region=False)
            assert abs(v1 - v2) <= 1e-12 * max(1, abs(v1))
            assert abs(d1 - d2) <= 1e-12 * max(1, abs(d1))
            assert np.abs(g1 - g2).max() <= 1e-10 * max(1, np.abs(g1).max())

    def test_section_w_fixed_frame_det(self):
        spec = BarrierSpec(
            "section-w", {"epsilon": 1e-3, "h": 0.02, "Lambda": 3.0, "C1": 2.0}
        )
        _, _, det = evaluate(spec, [0.01, 0.005])
        assert det == pytest.approx(6.0, rel=1e-12)

    def test_scale_and_offset(self):
        spec = _quadratic(mu=1.0, lam=2.0)
        v0, g0, d0 = evaluate(spec, [0.1, 0.2])
        v1, g1, d1 = evaluate(replace(spec, scale=10.0, offset=0.5), [0.1, 0.2])
        assert v1 == pytest.approx(10 * v0 + 0.5, rel=1e-14)
        assert np.allclose(g1, 10 * g0)
        assert d1 == pytest.approx(100 * d0, rel=1e-14)

    def test_kink_and_region_errors(self):
        spec = _angular()
        with pytest.raises(KinkPoint):
            evaluate(spec, [0.0, 0.5], check_region=False)
        with pytest.raises(OutsideRegion):
            evaluate(spec, [0.5, 0.01])
        with pytest.raises(OutsideRegion):
            evaluate(_quadratic(), [0.1, 0.9])

    def test_spec_validation(self):
        with pytest.raises(UnknownName):
            BarrierSpec("cubic", {})
        with pytest.raises(ValueError):
            BarrierSpec("quadratic", {"mu": 1.0})
        with pytest.raises(ValueError):
            _angular(theta0=2.0)
        with pytest.raises(ValueError):
            _angular(sigma=-0.1)


class TestSubsolution:
    def test_quadratic_passes(self):
        rep = verify_subsolution(_quadratic(mu=1.0, lam=2.0), 2.0)
        assert rep.passed
        assert rep.min_det == pytest.approx(8.0, rel=1e-12)
        assert rep.fd_ok and rep.fd_max_rel_err <= 1e-3

    def test_catalog_all_pass_with_fd(self):
        for spec in standard_catalog():
            lam = spec.params.get("Lambda", 4.0)
            rep = verify_subsolution(spec, lam, fd_points=100)
            assert rep.passed, spec.kind
            assert rep.fd_max_rel_err <= 1e-3, spec.kind

    def test_sample_floor(self):
        rep = verify_subsolution(_quadratic(), 2.0, n_samples=10)
        assert rep.n_samples >= 1000

    def test_angular_sufficient_amplitude_passes(self):
        theta0, m, lam = 1.0, 1.2, 2.0
        c0 = sufficient_angular_amplitude(theta0, m, lam)
        rep = verify_subsolution(_angular(0.1, c0, m, theta0), lam)
        assert rep.passed

    def test_angular_low_amplitude_fails_near_wedge_edge(self):
        theta0, m, lam = 1.0, 1.2, 2.0
        c0 = 0.9 * sufficient_angular_amplitude(theta0, m, lam)
        rep = verify_subsolution(_angular(0.1, c0, m, theta0), lam)
        assert not rep.passed
        theta = np.arctan2(rep.witness[1], rep.witness[0])
        edge = min(abs(theta - theta0), abs(np.pi - theta0 - theta))
        assert edge <= 0.2

    def test_john_frame_threshold(self):
        c, h, lam = 0.5, 0.01, 4.0
        threshold = 2 * c * h / np.sqrt(lam)
        for factor, expect in ((0.9, True), (1.1, False)):
            d = np.sqrt(threshold * factor)
            spec = BarrierSpec(
                "section-w",
                {"epsilon": 1e-3, "h": h, "Lambda": lam, "c": c, "d": [d, d]},
            )
            assert verify_subsolution(spec, lam).passed is expect


class TestComparison:
    def test_quadratic_vs_radial(self, radial_solution):
        spec = standard_catalog()[0]
        rep = verify_comparison(spec, radial_solution)
        assert rep.passed
        assert rep.min_margin >= rep.threshold
        assert rep.boundary_points > 0

    def test_scaled_up_control_fails(self, radial_solution):
        spec = replace(standard_catalog()[0], scale=10.0)
        with pytest.raises(BoundaryDominanceFails) as err:
            verify_comparison(spec, radial_solution)
        assert err.value.witness is not None

    def test_lowering_preserves_pass(self, radial_solution):
        spec = standard_catalog()[0]
        base = verify_comparison(spec, radial_solution)
        lowered = verify_comparison(replace(spec, offset=-0.3), radial_solution)
        assert base.passed and lowered.passed
        assert lowered.min_margin == pytest.approx(
            base.min_margin + 0.3, abs=1e-9
        )

    def test_honest_axes_break_dominance(self, radial_solution):
        # If the section really had the claimed axes, the contradiction
        # barrier would slip under the solution; with true axes it must
        # poke above the boundary data instead.
        h = 0.01
        d = [0.1, 0.1]
        c = np.sqrt(4.0) * d[0] * d[1] / (2 * h) * 1.01
        spec = BarrierSpec(
            "section-w",
            {"epsilon": 1e-3, "h": h, "Lambda": 4.0, "c": c, "d": d},
        )
        assert verify_subsolution(spec, 4.0).passed
        with pytest.raises(BoundaryDominanceFails):
            verify_comparison(spec, radial_solution)


class TestProbe:
    def test_radial_probe_near_zero(self, radial_solution):
        sp_ = radial_solution.grid.spacing
        probe = tangent_contradiction_probe(radial_solution)
        assert 0.0 <= probe <= 2 * sp_ + 1e-12

    def test_planted_linear_minorant(self):
        grid = build_grid(half_disk_domain(), 1 / 64, 2)
        vals = (grid.nodes**2).sum(axis=1) + 0.3 * grid.nodes[:, 1]
        sol = GridSolution(
            grid=grid,
            values=vals,
            bv_p=np.zeros_like(grid.wp),
            bv_m=np.zeros_like(grid.wm),
            residual_inf=0.0,
            iterations=0,
            converged=True,
        )
        probe = tangent_contradiction_probe(sol)
        assert probe == pytest.approx(0.3, abs=2 / 64)


class TestHelpers:
    def test_plane_constant_sufficient(self):
        mu, lam, rho, radius = 1.0, 4.0, 0.45, 1.0
        c = sufficient_plane_constant(mu, lam, rho, radius)
        # Top of the strip: barrier nonpositive across the radius.
        spec = BarrierSpec(
            "quadratic",
            {"mu": mu, "Lambda": lam, "c_rho": c, "rho": rho, "radius": radius},
        )
        for x1 in np.linspace(-radius, radius, 101):
            v, _, _ = evaluate(spec, [x1, rho])
            assert v <= 1e-12

    def test_angular_amplitude_is_marginal(self):
        theta0, m, lam = 1.0, 1.2, 2.0
        c0 = sufficient_angular_amplitude(theta0, m, lam)
        bound = lambda c: (c**2 + 1) * np.sin(theta0) ** 4 / (2 * m**4)
        assert bound(c0) > lam
        assert bound(0.99 * c0) < lam

    def test_smallest_dominated_slope(self, radial_solution):
        delta = 0.5
        n = smallest_dominated_slope(radial_solution, delta)
        nodes = radial_solution.grid.nodes
        vals = radial_solution.values
        lower = delta * np.abs(nodes[:, 0]) - n * nodes[:, 1]
        assert np.all(vals >= lower - 1e-9)
        shaved = delta * np.abs(nodes[:, 0]) - 0.9 * n * nodes[:, 1]
        assert np.any(vals < shaved - 1e-12)


class TestCatalogIO:
    def test_roundtrip(self, tmp_path):
        specs = standard_catalog()
        specs.append(replace(specs[0], scale=10.0, offset=-0.25))
        path = tmp_path / "catalog.json"
        save_catalog(specs, path)
        again = load_catalog(path)
        assert again == specs
