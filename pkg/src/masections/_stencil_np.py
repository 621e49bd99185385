"""NumPy reference implementation of the wide-stencil kernels.

The Monge-Ampere operator is the minimum over orthogonal direction pairs of
the product of clamped directional second derivatives. ``_stencil`` (the
compiled twin of this module) implements the same two functions; either can
back :mod:`masections.kernels`.
"""

from __future__ import annotations

import numpy as np


def second_differences(u, nbr_p, nbr_m, bv_p, bv_m, wp, wm):
    """Directional second derivatives, (N, D)."""
    up = np.where(nbr_p >= 0, u[np.maximum(nbr_p, 0)], bv_p)
    um = np.where(nbr_m >= 0, u[np.maximum(nbr_m, 0)], bv_m)
    return wp * up + wm * um - (wp + wm) * u[:, None]


def ma_operator(u, nbr_p, nbr_m, bv_p, bv_m, wp, wm, pair_a, pair_b):
    """Evaluate the min-over-pairs operator.

    Returns
    -------
    ma : (N,) operator values
    pair_idx : (N,) argmin pair per node
    fac_a, fac_b : (N,) the two clamped second-derivative factors at the
        argmin pair (needed for the semismooth Jacobian).
    """
    d2 = second_differences(u, nbr_p, nbr_m, bv_p, bv_m, wp, wm)
    fa = np.maximum(d2[:, pair_a], 0.0)
    fb = np.maximum(d2[:, pair_b], 0.0)
    prod = fa * fb
    k = np.argmin(prod, axis=1)
    idx = np.arange(len(u))
    return prod[idx, k], k.astype(np.int64), fa[idx, k], fb[idx, k]


def relax(u, nbr_p, nbr_m, bv_p, bv_m, wp, wm, pair_a, pair_b, f, dt, steps):
    """Pseudo-time relaxation u <- u + dt (MA_W[u] - f), double buffered."""
    out = np.array(u, dtype=float, copy=True)
    for _ in range(int(steps)):
        ma, _, _, _ = ma_operator(out, nbr_p, nbr_m, bv_p, bv_m, wp, wm, pair_a, pair_b)
        out = out + dt * (ma - f)
    return out
