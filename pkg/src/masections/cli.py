"""Command line front end: solve, sweep, verify-barriers, report.

Every subcommand exits 0 exactly when its checks pass, so the tool can
gate a pipeline.  Numeric options accept plain floats or fractions like
``1/128``.
"""

import argparse
import json
import os
import sys

import numpy as np

from .barriers import (
    comparison_report_to_dict,
    load_catalog,
    standard_catalog,
    subsolution_report_to_dict,
    verify_comparison,
    verify_subsolution,
)
from .errors import BoundaryDominanceFails, MasectionsError, TooFewRows
from .problems import load_problem, make_standard_problem, save_problem
from .sections import tangent_normalize
from .solver import save_solution, solve
from .sweep import (
    SweepReport,
    SweepRow,
    check_b_doubling,
    check_nu_drift,
    emit,
    fit_volume_exponent,
    run_sweep,
)


def _fraction(text):
    """Float option value, accepting a/b fractions."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _get_problem(name_or_path):
    if os.path.exists(name_or_path):
        return load_problem(name_or_path)
    return make_standard_problem(name_or_path)


def _cmd_solve(args):
    spec = _get_problem(args.problem)
    solution = solve(
        spec, args.spacing, width=args.width, tol=args.tol, strict=False
    )
    normalized = tangent_normalize(solution, base=spec.boundary.base)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        save_problem(spec, os.path.join(args.out, "problem.json"))
        save_solution(solution, args.out)
    print(
        f"{spec.name}: {len(solution)} nodes, spacing {solution.grid.spacing:g}, "
        f"width {solution.grid.width}, residual {solution.residual_inf:.3e} "
        f"after {solution.iterations} iterations, "
        f"tangent slope {normalized.tangent_slope:.3e}"
    )
    if not solution.converged:
        print("solve did not reach the requested tolerance", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(args):
    spec = _get_problem(args.problem)
    report = run_sweep(
        spec,
        h_max=args.hmax,
        levels=args.levels,
        spacing=args.spacing,
        width=args.width,
        tol=args.tol,
    )
    if args.out:
        csv_path, json_path = emit(report, args.out)
        print(f"wrote {csv_path} and {json_path}")
    _print_report(report)
    return 0 if report.error is None else 1


def _print_report(report):
    print(f"{report.problem}: spacing {report.spacing:g}, width {report.width}")
    for row in report.rows:
        flags = f"  [{'|'.join(row.flags)}]" if row.flags else ""
        print(
            f"  h={row.h:<12.6g} |S_h|/h={row.area / row.h:.4f} "
            f"b={row.b:.4f} nu={row.nu1:+.5f} "
            f"k_out/k_in={row.k_out / row.k_in:.4f}{flags}"
        )
    if report.error is not None:
        print(f"  stopped early: {report.error}")
    try:
        exponent = fit_volume_exponent(report)
        print(f"  volume exponent {exponent:.4f}")
    except TooFewRows:
        print("  volume exponent: too few unflagged rows")
    drift = check_nu_drift(report)
    doubling = check_b_doubling(report)
    print(
        f"  nu drift {'pass' if drift.passed else 'FAIL'} "
        f"(max {drift.max_drift:.4g}), "
        f"b doubling {'pass' if doubling.passed else 'FAIL'} "
        f"(floor {doubling.b_floor:.4g})"
    )
    return drift.passed and doubling.passed


def _cmd_verify_barriers(args):
    catalog = load_catalog(args.catalog) if args.catalog else standard_catalog()
    payload = {"subsolution": [], "comparison": []}
    ok = True
    for spec in catalog:
        lam = args.lam if args.lam is not None else spec.params.get("Lambda", 1.0)
        rep = verify_subsolution(spec, lam)
        entry = subsolution_report_to_dict(rep)
        entry["kind"] = spec.kind
        payload["subsolution"].append(entry)
        status = "pass" if rep.passed else "FAIL"
        print(
            f"subsolution {spec.kind:<12s} {status}  min det {rep.min_det:.6g} "
            f"vs {lam:g}, fd err {rep.fd_max_rel_err:.2e}"
        )
        ok = ok and rep.passed
    if args.problem:
        problem = _get_problem(args.problem)
        solution = solve(problem, args.spacing, width=args.width, tol=args.tol)
        normalized = tangent_normalize(solution, base=problem.boundary.base)
        for spec in catalog:
            if spec.kind != "quadratic":
                continue
            try:
                rep = verify_comparison(spec, normalized)
            except BoundaryDominanceFails as err:
                ok = False
                entry = {"kind": spec.kind, "passed": False, "witness": list(err.witness)}
                print(f"comparison {spec.kind:<12s} FAIL  dominance broken at {err.witness}")
            else:
                entry = comparison_report_to_dict(rep)
                entry["kind"] = spec.kind
                ok = ok and rep.passed
                status = "pass" if rep.passed else "FAIL"
                print(
                    f"comparison {spec.kind:<12s} {status}  min margin "
                    f"{rep.min_margin:.4g} over {problem.name}"
                )
            payload["comparison"].append(entry)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0 if ok else 1


def _cmd_report(args):
    path = os.path.join(args.in_dir, "report.json")
    with open(path) as fh:
        data = json.load(fh)
    rows = [
        SweepRow(
            h=row["h"],
            area=row["area"],
            b=row["b"],
            nu1=row["nu1"],
            d1=row["d1"],
            d2=row["d2"],
            k_in=row["k_in"],
            k_out=row["k_out"],
            centroid_offset=row["centroid_offset"],
            axis_angle=row["axis_angle"],
            n_inside=row.get("n_inside", 0),
            flags=tuple(row.get("flags", ())),
        )
        for row in data["rows"]
    ]
    report = SweepReport(
        problem=data["problem"],
        spacing=data["spacing"],
        width=data["width"],
        rows=rows,
        error=data.get("error"),
    )
    checks = _print_report(report)
    return 0 if checks and report.error is None else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="masections",
        description="Boundary sections of the planar Monge-Ampere equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one problem on a grid")
    p.add_argument("--problem", required=True, help="standard name or problem.json path")
    p.add_argument("--spacing", type=_fraction, default=1 / 64)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", help="directory for solution.csv/solution.json/problem.json")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="section ladder with shape metrics")
    p.add_argument("--problem", required=True)
    p.add_argument("--hmax", type=_fraction, default=0.125)
    p.add_argument("--levels", type=int, default=8)
    p.add_argument("--spacing", type=_fraction, default=1 / 128)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", help="directory for report.csv/report.json")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify-barriers", help="check the barrier catalog")
    p.add_argument("--catalog", help="catalog JSON (default: built-in catalog)")
    p.add_argument("--lam", type=float, help="det lower bound (default: each barrier's Lambda)")
    p.add_argument("--problem", help="also run the comparison check against this solve")
    p.add_argument("--spacing", type=_fraction, default=1 / 64)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", help="JSON file for the verification reports")
    p.set_defaults(func=_cmd_verify_barriers)

    p = sub.add_parser("report", help="re-check and pretty-print a sweep report")
    p.add_argument("--in", dest="in_dir", required=True, help="directory holding report.json")
    p.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MasectionsError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
