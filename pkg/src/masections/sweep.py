"""Level-ladder sweeps: per-level section metrics, power-law fits, drift checks.

A sweep solves the problem once, normalizes the tangent plane, then walks a
geometric ladder of levels h extracting one section per level.  Each level
becomes one row of scalars (area, b, sliding slope, John axes, sandwich
constants).  On top of the rows sit three checks:

* ``fit_volume_exponent``: least-squares slope of log area vs log h, which
  should be n/2 = 1 in the plane;
* ``check_nu_drift``: the sliding slopes of consecutive levels must not
  drift apart at an increasing rate;
* ``check_b_doubling``: whenever b drops below the critical constant c0,
  some comparable lower level must at least double it.

Rows whose section is too coarse for the grid, or whose John frame is
visibly tilted, are flagged; fits use unflagged rows only.  ``emit`` writes
the row table as CSV and the full report (rows, fits, constants) as
deterministic JSON.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateCentroid,
    EmptySection,
    NoConvergence,
    TooFewRows,
)
from .sections import extract_section, john_normalize, sliding_map, tangent_normalize
from .solver import solve

CSV_COLUMNS = (
    "h",
    "area",
    "b",
    "nu1",
    "d1",
    "d2",
    "k_in",
    "k_out",
    "centroid_offset",
    "axis_angle",
    "flags",
)

# Sections with fewer interior nodes than this are kept in the table but
# flagged "coarse" and excluded from the fits.
COARSE_NODES = 30

_RATIO_RANGE = (1.5, 4.0)
_MIN_LEVELS = 8
_DRIFT_FLOOR = 5e-3


@dataclass(frozen=True)
class SweepRow:
    """One ladder level reduced to scalars."""

    h: float
    area: float
    b: float
    nu1: float
    d1: float
    d2: float
    k_in: float
    k_out: float
    centroid_offset: float
    axis_angle: float
    n_inside: int = 0
    flags: tuple = ()


@dataclass(frozen=True)
class SweepReport:
    """Ladder of rows sorted by decreasing h, plus solve metadata.

    ``error`` is set when the ladder aborted early; the rows collected up
    to that point are kept (partial report).
    """

    problem: str
    spacing: float
    width: int
    rows: tuple
    error: str = None

    def __post_init__(self):
        hs = [row.h for row in self.rows]
        for hi, lo in zip(hs, hs[1:]):
            ratio = hi / lo
            if not _RATIO_RANGE[0] <= ratio <= _RATIO_RANGE[1]:
                raise ValueError(
                    f"ladder ratio {ratio:.4g} outside {_RATIO_RANGE}; rows must "
                    "descend geometrically"
                )

    def unflagged(self):
        """Rows that carry no quality flags, in ladder order."""
        return [row for row in self.rows if not row.flags]


@dataclass(frozen=True)
class NuDriftResult:
    """Adjacent-level sliding drift summary."""

    passed: bool
    max_drift: float
    first_half_max: float
    last_half_max: float
    bound_constant: float
    drifts: tuple = ()


@dataclass(frozen=True)
class BDoublingResult:
    """Doubling events for levels where b fell below ``c0``."""

    passed: bool
    b_floor: float
    events: tuple = ()
    misses: tuple = ()


def build_ladder(h_max, levels):
    """Geometric level ladder h_max, h_max/2, ..., h_max/2^(levels-1).

    Parameters
    ----------
    h_max : float
        Top level; must be positive.
    levels : int
        Ladder length; at least 8 so the drift and doubling checks have
        enough adjacent pairs to say anything.
    """
    if not h_max > 0.0:
        raise ValueError("h_max must be positive")
    if levels < _MIN_LEVELS:
        raise ValueError(f"need at least {_MIN_LEVELS} levels, got {levels}")
    return tuple(h_max * 2.0 ** (-i) for i in range(levels))


def _validate_ladder(ladder):
    ladder = tuple(float(h) for h in ladder)
    if len(ladder) < _MIN_LEVELS:
        raise ValueError(f"need at least {_MIN_LEVELS} levels, got {len(ladder)}")
    if any(h <= 0.0 for h in ladder):
        raise ValueError("levels must be positive")
    for hi, lo in zip(ladder, ladder[1:]):
        ratio = hi / lo
        if not _RATIO_RANGE[0] <= ratio <= _RATIO_RANGE[1]:
            raise ValueError(
                f"ladder ratio {ratio:.4g} outside {_RATIO_RANGE}"
            )
    return ladder


def run_sweep(
    problem,
    h_max=0.125,
    levels=8,
    spacing=1.0 / 128.0,
    width=2,
    tol=1e-8,
    ladder=None,
    solution=None,
    clip_points=720,
):
    """Solve once and extract one section row per ladder level.

    Parameters
    ----------
    problem : ProblemSpec
        Domain, right-hand side and boundary data.
    h_max, levels : float, int
        Define the default ratio-2 ladder; ignored when ``ladder`` is given.
    spacing, width, tol : float, int, float
        Grid parameters forwarded to the solver (ignored for ``spacing`` and
        ``width`` when ``solution`` is supplied).  The default tolerance sits
        above the roundoff floor set by near-boundary cut weights on fine
        grids; tightening it below 1e-9 can stall solves on polygon domains.
    ladder : sequence of float, optional
        Explicit decreasing levels.  Must have at least 8 entries with
        adjacent ratios in [1.5, 4].
    solution : GridSolution, optional
        Reuse an existing raw solve of the same problem instead of solving.
    clip_points : int
        Boundary resolution of the domain polygon used for clipping.

    Returns
    -------
    SweepReport
        Rows sorted by decreasing h.  If a level fails (section empty,
        centroid degenerate, ellipsoid iteration stuck) the sweep stops
        there and returns the rows collected so far with ``error`` set.
    """
    if ladder is None:
        ladder = build_ladder(h_max, levels)
    ladder = _validate_ladder(sorted((float(h) for h in ladder), reverse=True))

    if solution is None:
        solution = solve(problem, spacing=spacing, width=width, tol=tol)
    normalized = tangent_normalize(solution, base=problem.boundary.base)

    rows = []
    error = None
    for h in ladder:
        try:
            section = extract_section(normalized, h, boundary=problem.boundary)
            sliding = sliding_map(section)
            metrics = john_normalize(section, sliding, clip_points=clip_points)
        except (EmptySection, DegenerateCentroid, NoConvergence) as exc:
            error = f"h={h:.6g}: {type(exc).__name__}: {exc}"
            break
        flags = set(metrics.flags)
        if section.n_inside < COARSE_NODES:
            flags.add("coarse")
        rows.append(
            SweepRow(
                h=h,
                area=metrics.area,
                b=metrics.b,
                nu1=metrics.nu.nu,
                d1=metrics.d[0],
                d2=metrics.d[1],
                k_in=metrics.k_in,
                k_out=metrics.k_out,
                centroid_offset=metrics.centroid_offset,
                axis_angle=metrics.axis_angle,
                n_inside=section.n_inside,
                flags=tuple(sorted(flags)),
            )
        )

    return SweepReport(
        problem=problem.name,
        spacing=float(solution.grid.spacing),
        width=int(solution.grid.width),
        rows=tuple(rows),
        error=error,
    )


def fit_volume_exponent(report, min_rows=5):
    """Least-squares exponent of area against h on unflagged rows.

    Fits log(area) = p log(h) + const and returns p, which should sit near
    n/2 = 1 for genuine sections in the plane.

    Raises
    ------
    TooFewRows
        If fewer than ``min_rows`` unflagged rows are available.
    """
    rows = report.unflagged()
    if len(rows) < min_rows:
        raise TooFewRows(
            f"volume fit needs {min_rows} unflagged rows, have {len(rows)}"
        )
    x = np.log([row.h for row in rows])
    y = np.log([row.area for row in rows])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def check_nu_drift(report):
    """Adjacent-level sliding drift |nu(h) - nu(h/2)| must not grow.

    Computes all adjacent drifts on unflagged rows, then compares the
    largest drift in the deep (small-h) half against the shallow half:
    the sweep passes when the deep half is at most twice the shallow half,
    with a small absolute floor so that noise near zero drift never fails
    the check.  Also reports the smallest constant C with
    |nu(h)| <= C (1 + |log h|) across the rows.
    """
    rows = report.unflagged()
    nus = np.array([row.nu1 for row in rows], dtype=float)
    hs = np.array([row.h for row in rows], dtype=float)
    if len(rows) == 0:
        return NuDriftResult(
            passed=True,
            max_drift=0.0,
            first_half_max=0.0,
            last_half_max=0.0,
            bound_constant=0.0,
        )
    bound = float(np.max(np.abs(nus) / (1.0 + np.abs(np.log(hs)))))
    if len(rows) < 3:
        return NuDriftResult(
            passed=True,
            max_drift=0.0,
            first_half_max=0.0,
            last_half_max=0.0,
            bound_constant=bound,
        )
    drifts = np.abs(np.diff(nus))
    half = len(drifts) // 2
    first = float(np.max(drifts[:half]))
    last = float(np.max(drifts[half:]))
    passed = last <= max(2.0 * first, _DRIFT_FLOOR)
    return NuDriftResult(
        passed=bool(passed),
        max_drift=float(np.max(drifts)),
        first_half_max=first,
        last_half_max=last,
        bound_constant=bound,
        drifts=tuple(float(d) for d in drifts),
    )


def check_b_doubling(report, c0=0.25):
    """Doubling check: b below ``c0`` must double at some comparable level.

    For every row with b(h) <= c0, scan the deeper rows th with
    t = (th)/h in [c0, 1) for one with b(th) >= 2 b(h).  Rows that find
    such a level are recorded as events; rows that do not are misses and
    fail the check.  Also reports the ladder-wide minimum of b.
    """
    rows = list(report.rows)
    b_floor = min((row.b for row in rows), default=float("nan"))
    events = []
    misses = []
    for i, row in enumerate(rows):
        if row.b > c0:
            continue
        found = None
        for deeper in rows[i + 1 :]:
            t = deeper.h / row.h
            if t < c0:
                break
            if deeper.b >= 2.0 * row.b:
                found = (row.h, t, deeper.b / row.b)
                break
        if found is None:
            misses.append((row.h, row.b))
        else:
            events.append(found)
    return BDoublingResult(
        passed=not misses,
        b_floor=float(b_floor),
        events=tuple(events),
        misses=tuple(misses),
    )


def _fits_payload(report):
    try:
        exponent = fit_volume_exponent(report)
    except TooFewRows:
        exponent = None
    drift = check_nu_drift(report)
    doubling = check_b_doubling(report)
    return {
        "volume_exponent": exponent,
        "nu_drift": {
            "passed": drift.passed,
            "max_drift": drift.max_drift,
            "first_half_max": drift.first_half_max,
            "last_half_max": drift.last_half_max,
            "bound_constant": drift.bound_constant,
            "drifts": list(drift.drifts),
        },
        "b_doubling": {
            "passed": doubling.passed,
            "b_floor": doubling.b_floor,
            "events": [list(e) for e in doubling.events],
            "misses": [list(m) for m in doubling.misses],
        },
    }


def _constants_payload(report):
    rows = report.rows
    if not rows:
        return {"k0": None, "k_ratio_max": None, "b_floor": None}
    vol_ratios = [row.area / row.h for row in rows]
    k0 = min(min(vol_ratios), 1.0 / max(vol_ratios))
    k_ratio = max(row.k_out / row.k_in for row in rows)
    return {
        "k0": float(k0),
        "k_ratio_max": float(k_ratio),
        "b_floor": float(min(row.b for row in rows)),
    }


def report_payload(report):
    """JSON-ready dict for ``report``: rows, fits, sandwich constants."""
    return {
        "problem": report.problem,
        "spacing": report.spacing,
        "width": report.width,
        "error": report.error,
        "rows": [
            {
                "h": row.h,
                "area": row.area,
                "b": row.b,
                "nu1": row.nu1,
                "d1": row.d1,
                "d2": row.d2,
                "k_in": row.k_in,
                "k_out": row.k_out,
                "centroid_offset": row.centroid_offset,
                "axis_angle": row.axis_angle,
                "n_inside": row.n_inside,
                "flags": list(row.flags),
            }
            for row in report.rows
        ],
        "fits": _fits_payload(report),
        "constants": _constants_payload(report),
    }


def emit(report, out_dir):
    """Write ``report.csv`` and ``report.json`` under ``out_dir``.

    The CSV has the fixed header ``h,area,...,flags`` (flags joined by
    ``|``) and one line per row; an empty report yields the header only.
    The JSON is rendered with sorted keys and stable float formatting so
    identical reports produce byte-identical files.

    Returns
    -------
    (pathlib.Path, pathlib.Path)
        Paths of the CSV and JSON files.
    """
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    csv_path = out / "report.csv"
    lines = [",".join(CSV_COLUMNS)]
    for row in report.rows:
        lines.append(
            ",".join(
                [
                    repr(float(row.h)),
                    repr(float(row.area)),
                    repr(float(row.b)),
                    repr(float(row.nu1)),
                    repr(float(row.d1)),
                    repr(float(row.d2)),
                    repr(float(row.k_in)),
                    repr(float(row.k_out)),
                    repr(float(row.centroid_offset)),
                    repr(float(row.axis_angle)),
                    "|".join(row.flags),
                ]
            )
        )
    csv_path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))

    json_path = out / "report.json"
    payload = report_payload(report)
    json_path.write_bytes(
        (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")
    )
    return csv_path, json_path
