"""Time the stencil kernels: compiled extension vs NumPy fallback.

Builds a real grid, evaluates the min-over-pairs operator and the
relaxation loop with both backends, checks they agree, and prints
per-call timings.

Run:  python benchmarks/bench_kernels.py [--spacing 1/128] [--width 2]
"""

import argparse
import time

import numpy as np

from masections import _stencil_np
from masections.grid import build_grid
from masections.problems import make_standard_problem
from masections.solver import solve

try:
    from masections import _stencil
except ImportError:
    _stencil = None


def _fraction(text):
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def time_call(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--spacing", type=_fraction, default=1 / 128)
    parser.add_argument("--width", type=int, default=2)
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--relax-steps", type=int, default=50)
    args = parser.parse_args()

    problem = make_standard_problem("radial")
    grid = build_grid(problem.domain, args.spacing, args.width)
    solution = solve(problem, args.spacing, width=args.width, tol=1e-8)
    u = solution.values
    bv_p, bv_m = grid.boundary_values(problem.boundary)
    f = np.full(len(grid), 4.0)
    pa = np.ascontiguousarray(grid.pairs[:, 0])
    pb = np.ascontiguousarray(grid.pairs[:, 1])
    common = (grid.nbr_p, grid.nbr_m, bv_p, bv_m, grid.wp, grid.wm, pa, pb)

    print(
        f"grid: {len(grid)} nodes, {grid.n_directions} directions, "
        f"{len(grid.pairs)} pairs (spacing {args.spacing:g}, width {args.width})"
    )

    backends = [("numpy", _stencil_np)]
    if _stencil is not None:
        backends.append(("cython", _stencil))
    else:
        print("compiled extension not importable; timing the fallback only")

    op_out = {}
    op_best = {}
    for name, impl in backends:
        best, out = time_call(lambda: impl.ma_operator(u, *common), args.repeat)
        op_best[name] = best
        op_out[name] = out
        print(f"ma_operator {name:>6s}: {best * 1e3:8.3f} ms")

    # Stable pseudo-time step: the second-difference weights scale like
    # 1/spacing^2, so dt must absorb that factor.
    dt = args.spacing**2 / 8.0
    relax_best = {}
    relax_out = {}
    for name, impl in backends:
        best, out = time_call(
            lambda: impl.relax(u, *common, f, dt, args.relax_steps),
            max(1, args.repeat // 4),
        )
        relax_best[name] = best
        relax_out[name] = out
        print(f"relax x{args.relax_steps} {name:>6s}: {best * 1e3:8.3f} ms")

    if len(backends) == 2:
        dma = np.abs(op_out["numpy"][0] - op_out["cython"][0]).max()
        drelax = np.abs(relax_out["numpy"] - relax_out["cython"]).max()
        print(f"agreement: |d ma| {dma:.3e}, |d relax| {drelax:.3e}")
        print(
            f"speedup: ma_operator x{op_best['numpy'] / op_best['cython']:.2f}, "
            f"relax x{relax_best['numpy'] / relax_best['cython']:.2f}"
        )
        if dma > 1e-12 or drelax > 1e-12:
            raise SystemExit("backends disagree beyond 1e-12")


if __name__ == "__main__":
    main()
