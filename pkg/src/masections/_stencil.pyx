# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of _stencil_np: per-node loops, no temporaries.

Signatures match the NumPy module exactly; masections.kernels picks one of
the two at import time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF MAX_DIRS = 128


def ma_operator(double[::1] u,
                cnp.int64_t[:, ::1] nbr_p, cnp.int64_t[:, ::1] nbr_m,
                double[:, ::1] bv_p, double[:, ::1] bv_m,
                double[:, ::1] wp, double[:, ::1] wm,
                cnp.int32_t[::1] pair_a, cnp.int32_t[::1] pair_b):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t nd = nbr_p.shape[1]
    cdef Py_ssize_t np_pairs = pair_a.shape[0]
    if nd > MAX_DIRS:
        raise ValueError("stencil direction count exceeds compiled limit")

    ma_arr = np.empty(n, dtype=np.float64)
    idx_arr = np.empty(n, dtype=np.int64)
    fa_arr = np.empty(n, dtype=np.float64)
    fb_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] ma = ma_arr
    cdef cnp.int64_t[::1] pidx = idx_arr
    cdef double[::1] fa_out = fa_arr
    cdef double[::1] fb_out = fb_arr

    cdef double d2[MAX_DIRS]
    cdef Py_ssize_t i, d, p, best_p
    cdef cnp.int64_t jp, jm
    cdef double ui, up, um, a, b, prod, best, best_a, best_b

    for i in range(n):
        ui = u[i]
        for d in range(nd):
            jp = nbr_p[i, d]
            up = u[jp] if jp >= 0 else bv_p[i, d]
            jm = nbr_m[i, d]
            um = u[jm] if jm >= 0 else bv_m[i, d]
            d2[d] = wp[i, d] * up + wm[i, d] * um - (wp[i, d] + wm[i, d]) * ui
        best = 0.0
        best_p = 0
        best_a = 0.0
        best_b = 0.0
        for p in range(np_pairs):
            a = d2[pair_a[p]]
            if a < 0.0:
                a = 0.0
            b = d2[pair_b[p]]
            if b < 0.0:
                b = 0.0
            prod = a * b
            if p == 0 or prod < best:
                best = prod
                best_p = p
                best_a = a
                best_b = b
        ma[i] = best
        pidx[i] = best_p
        fa_out[i] = best_a
        fb_out[i] = best_b
    return ma_arr, idx_arr, fa_arr, fb_arr


def relax(double[::1] u,
          cnp.int64_t[:, ::1] nbr_p, cnp.int64_t[:, ::1] nbr_m,
          double[:, ::1] bv_p, double[:, ::1] bv_m,
          double[:, ::1] wp, double[:, ::1] wm,
          cnp.int32_t[::1] pair_a, cnp.int32_t[::1] pair_b,
          double[::1] f, double dt, int steps):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t nd = nbr_p.shape[1]
    cdef Py_ssize_t np_pairs = pair_a.shape[0]
    if nd > MAX_DIRS:
        raise ValueError("stencil direction count exceeds compiled limit")

    cur_arr = np.array(u, dtype=np.float64, copy=True)
    nxt_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] cur = cur_arr
    cdef double[::1] nxt = nxt_arr

    cdef double d2[MAX_DIRS]
    cdef Py_ssize_t s, i, d, p
    cdef cnp.int64_t jp, jm
    cdef double ui, up, um, a, b, prod, best

    for s in range(steps):
        for i in range(n):
            ui = cur[i]
            for d in range(nd):
                jp = nbr_p[i, d]
                up = cur[jp] if jp >= 0 else bv_p[i, d]
                jm = nbr_m[i, d]
                um = cur[jm] if jm >= 0 else bv_m[i, d]
                d2[d] = wp[i, d] * up + wm[i, d] * um - (wp[i, d] + wm[i, d]) * ui
            best = 0.0
            for p in range(np_pairs):
                a = d2[pair_a[p]]
                if a < 0.0:
                    a = 0.0
                b = d2[pair_b[p]]
                if b < 0.0:
                    b = 0.0
                prod = a * b
                if p == 0 or prod < best:
                    best = prod
            nxt[i] = ui + dt * (best - f[i])
        cur, nxt = nxt, cur
        cur_arr, nxt_arr = nxt_arr, cur_arr
    return cur_arr
