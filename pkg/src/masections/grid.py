"""Clipped Cartesian grids with wide-stencil neighbor tables.

A grid holds the lattice points strictly inside the domain together with,
for every stencil direction, either the interior neighbor one lattice step
away or the exact boundary crossing of that ray. Nonuniform (Shortley-Weller
style) second-difference weights are precomputed per node and direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TooCoarse

# Nodes closer to the boundary than this fraction of the spacing are dropped;
# keeps boundary-arm fractions (and hence the difference weights) conditioned.
_INSET_FRAC = 1e-3

# Defensive floor for the boundary-crossing parameter of an arm.
_T_FLOOR = 1e-6

_RAY_CHUNK = 50_000


def stencil_directions(width):
    """Primitive lattice directions with angle in [0, pi) up to ``width``.

    Returns
    -------
    dirs : (D, 2) int array
    pairs : (P, 2) int array
        Index pairs (a, b) into ``dirs`` with dirs[b] = rot90(dirs[a]); every
        orthogonal stencil pair appears exactly once.
    """
    dirs = [(1, 0)]
    for q in range(1, width + 1):
        for p in range(-width, width + 1):
            if math.gcd(abs(p), q) == 1:
                dirs.append((p, q))
    index = {d: i for i, d in enumerate(dirs)}
    pairs = []
    for (p, q), i in index.items():
        if p > 0 and q >= 0:  # first quadrant reps; partner is its rotation
            pairs.append((i, index[(-q, p)]))
    return np.array(dirs, dtype=np.int32), np.array(pairs, dtype=np.int32)


@dataclass
class Grid:
    """Interior lattice nodes plus stencil arm tables.

    For node i and direction d, ``nbr_p[i, d]`` is the index of the interior
    neighbor one step along +dirs[d], or -1 when the arm exits the domain;
    then the exit data lives at position ``cut_id_p[i, d]`` in the cut arrays.
    ``wp``/``wm`` are the nonuniform second-difference weights: the second
    derivative along dirs[d] is wp*u(+arm) + wm*u(-arm) - (wp+wm)*u(center).
    """

    domain: object
    spacing: float
    width: int
    nodes: np.ndarray
    lattice: np.ndarray
    dirs: np.ndarray
    pairs: np.ndarray
    nbr_p: np.ndarray
    nbr_m: np.ndarray
    cut_id_p: np.ndarray
    cut_id_m: np.ndarray
    cut_xy_p: np.ndarray
    cut_xy_m: np.ndarray
    t_p: np.ndarray
    t_m: np.ndarray
    wp: np.ndarray
    wm: np.ndarray
    node_of: np.ndarray = field(repr=False, default=None)
    lattice_origin: tuple = (0, 0)

    def __len__(self):
        return len(self.nodes)

    @property
    def n_directions(self):
        return len(self.dirs)

    def axis_direction_indices(self):
        """Indices of the (1,0) and (0,1) directions."""
        ix = int(np.where((self.dirs == [1, 0]).all(axis=1))[0][0])
        iy = int(np.where((self.dirs == [0, 1]).all(axis=1))[0][0])
        return ix, iy

    def node_at(self, i, j):
        """Node index at lattice coordinates (i, j), or -1."""
        i0, j0 = self.lattice_origin
        ii, jj = i - i0, j - j0
        if 0 <= ii < self.node_of.shape[0] and 0 <= jj < self.node_of.shape[1]:
            return int(self.node_of[ii, jj])
        return -1

    def boundary_values(self, boundary_data, tangent=None):
        """Dense (N, D) arrays of Dirichlet values at the arm exit points.

        Parameters
        ----------
        boundary_data : BoundaryData
        tangent : (base, slope), optional
            When given, base + slope*x2 is subtracted from the raw values
            (used to re-express data for a tangent-normalized solution).
        """
        n, d = self.nbr_p.shape
        bv_p = np.zeros((n, d))
        bv_m = np.zeros((n, d))
        for nbr, cid, xy, bv in (
            (self.nbr_p, self.cut_id_p, self.cut_xy_p, bv_p),
            (self.nbr_m, self.cut_id_m, self.cut_xy_m, bv_m),
        ):
            rows, cols = np.nonzero(nbr < 0)
            pts = xy[cid[rows, cols]]
            vals = boundary_data.solve_values(pts)
            if tangent is not None:
                base, slope = tangent
                vals = vals - base - slope * pts[:, 1]
            bv[rows, cols] = vals
        return bv_p, bv_m


def build_grid(domain, spacing, width=2):
    """Build the clipped lattice and stencil tables for ``domain``.

    Parameters
    ----------
    domain : ConvexDomain
    spacing : float
        Lattice spacing; must satisfy spacing <= rho/8.
    width : int
        Stencil width in [2, 8]; the direction set contains all primitive
        integer vectors with coordinates bounded by it.

    Raises
    ------
    TooCoarse
        If spacing violates the rho/8 bound or fewer than 100 interior
        nodes result.
    """
    if not 2 <= width <= 8:
        raise ValueError("stencil width must lie in [2, 8]")
    if spacing > domain.rho / 8.0 + 1e-15:
        raise TooCoarse(f"spacing {spacing} exceeds rho/8 = {domain.rho / 8.0}")

    h = float(spacing)
    lo, hi = domain.bounding_box()
    i_lo, i_hi = math.floor(lo[0] / h) - 1, math.ceil(hi[0] / h) + 1
    j_lo, j_hi = math.floor(lo[1] / h) - 1, math.ceil(hi[1] / h) + 1
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    pts = np.column_stack([ii * h, jj * h])
    inset = _INSET_FRAC * h
    if domain.kind == "disk":
        inside = np.hypot(*(pts - domain.center).T) <= domain.radius - inset
    else:
        slack = pts @ domain._poly._normals.T - domain._poly._offsets
        inside = slack.max(axis=1) <= -inset
    nodes = pts[inside]
    lat = np.column_stack([ii[inside], jj[inside]]).astype(np.int64)
    n = len(nodes)
    if n < 100:
        raise TooCoarse(f"only {n} interior nodes at spacing {spacing}")

    nx = i_hi - i_lo + 1
    ny = j_hi - j_lo + 1
    node_of = np.full((nx, ny), -1, dtype=np.int64)
    node_of[lat[:, 0] - i_lo, lat[:, 1] - j_lo] = np.arange(n)

    dirs, pairs = stencil_directions(width)
    d_count = len(dirs)
    nbr_p = np.full((n, d_count), -1, dtype=np.int64)
    nbr_m = np.full((n, d_count), -1, dtype=np.int64)
    t_p = np.ones((n, d_count))
    t_m = np.ones((n, d_count))
    cuts_p, cuts_m = [], []
    cut_id_p = np.full((n, d_count), -1, dtype=np.int64)
    cut_id_m = np.full((n, d_count), -1, dtype=np.int64)

    for k, (p, q) in enumerate(dirs):
        for sign, nbr, t_arr, cuts, cut_id in (
            (1, nbr_p, t_p, cuts_p, cut_id_p),
            (-1, nbr_m, t_m, cuts_m, cut_id_m),
        ):
            gi = lat[:, 0] + sign * p - i_lo
            gj = lat[:, 1] + sign * q - j_lo
            ok = (gi >= 0) & (gi < nx) & (gj >= 0) & (gj < ny)
            cand = np.full(n, -1, dtype=np.int64)
            cand[ok] = node_of[gi[ok], gj[ok]]
            nbr[:, k] = cand
            miss = np.nonzero(cand < 0)[0]
            if len(miss) == 0:
                continue
            direction = np.array([sign * p * h, sign * q * h])
            t = np.empty(len(miss))
            for s in range(0, len(miss), _RAY_CHUNK):
                blk = miss[s : s + _RAY_CHUNK]
                t[s : s + _RAY_CHUNK] = domain.ray_exit(
                    nodes[blk], np.broadcast_to(direction, (len(blk), 2))
                )
            t = np.clip(t, _T_FLOOR, None)
            t_arr[miss, k] = t
            exit_pts = nodes[miss] + t[:, None] * direction
            offset = sum(len(c) for c in cuts)
            cut_id[miss, k] = offset + np.arange(len(miss))
            cuts.append(exit_pts)

    cut_xy_p = np.vstack(cuts_p) if cuts_p else np.empty((0, 2))
    cut_xy_m = np.vstack(cuts_m) if cuts_m else np.empty((0, 2))

    lengths = np.hypot(dirs[:, 0], dirs[:, 1]) * h
    a = t_p * lengths
    b = t_m * lengths
    wp = 2.0 / (a * (a + b))
    wm = 2.0 / (b * (a + b))

    return Grid(
        domain=domain,
        spacing=h,
        width=int(width),
        nodes=nodes,
        lattice=lat,
        dirs=dirs,
        pairs=pairs,
        nbr_p=nbr_p,
        nbr_m=nbr_m,
        cut_id_p=cut_id_p,
        cut_id_m=cut_id_m,
        cut_xy_p=cut_xy_p,
        cut_xy_m=cut_xy_m,
        t_p=t_p,
        t_m=t_m,
        wp=wp,
        wm=wm,
        node_of=node_of,
        lattice_origin=(i_lo, j_lo),
    )
