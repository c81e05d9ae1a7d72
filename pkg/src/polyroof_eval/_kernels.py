"""Numba-compiled inner loops for polygon clipping and the Fréchet DP.

Everything here works on plain float64 arrays; the public API lives in
``geometry`` and ``metrics``. Kernels are cached to disk so the JIT cost is
paid once per environment.
"""

import numpy as np
from numba import njit

_CLIP_BUF = 16  # max vertices of a triangle clipped by 3 half-planes is 6; leave slack


@njit(cache=True)
def _tri_tri_area(ax, ay, bx, by):
    """Area of the intersection of two triangles (both CCW).

    Sutherland-Hodgman: clip triangle B against the three half-planes of
    triangle A, then shoelace. Points on a clip line count as inside, which
    makes shared edges/vertices exact instead of special cases.
    """
    cur_x = np.empty(_CLIP_BUF)
    cur_y = np.empty(_CLIP_BUF)
    out_x = np.empty(_CLIP_BUF)
    out_y = np.empty(_CLIP_BUF)
    n = 3
    for i in range(3):
        cur_x[i] = bx[i]
        cur_y[i] = by[i]

    for k in range(3):
        k2 = k + 1 if k < 2 else 0
        ex = ax[k2] - ax[k]
        ey = ay[k2] - ay[k]
        m = 0
        for i in range(n):
            j = i + 1 if i < n - 1 else 0
            px = cur_x[i]
            py = cur_y[i]
            qx = cur_x[j]
            qy = cur_y[j]
            dp = ex * (py - ay[k]) - ey * (px - ax[k])
            dq = ex * (qy - ay[k]) - ey * (qx - ax[k])
            if dp >= 0.0:
                out_x[m] = px
                out_y[m] = py
                m += 1
                if dq < 0.0:
                    t = dp / (dp - dq)
                    out_x[m] = px + t * (qx - px)
                    out_y[m] = py + t * (qy - py)
                    m += 1
            elif dq >= 0.0:
                t = dp / (dp - dq)
                out_x[m] = px + t * (qx - px)
                out_y[m] = py + t * (qy - py)
                m += 1
        n = m
        if n < 3:
            return 0.0
        for i in range(n):
            cur_x[i] = out_x[i]
            cur_y[i] = out_y[i]

    s = 0.0
    for i in range(n):
        j = i + 1 if i < n - 1 else 0
        s += cur_x[i] * cur_y[j] - cur_x[j] * cur_y[i]
    area = 0.5 * s
    return area if area > 0.0 else 0.0


@njit(cache=True)
def clip_area_sum(tris_a, tris_b):
    """Total intersection area between two triangle sets, shape (n, 3, 2).

    Each set must partition a simple polygon (pairwise interior-disjoint
    CCW triangles), so the pairwise sum equals the polygon intersection area.
    """
    na = tris_a.shape[0]
    nb = tris_b.shape[0]

    # Precompute triangle bounding boxes for cheap rejection.
    a_lo_x = np.empty(na)
    a_hi_x = np.empty(na)
    a_lo_y = np.empty(na)
    a_hi_y = np.empty(na)
    for i in range(na):
        a_lo_x[i] = min(tris_a[i, 0, 0], min(tris_a[i, 1, 0], tris_a[i, 2, 0]))
        a_hi_x[i] = max(tris_a[i, 0, 0], max(tris_a[i, 1, 0], tris_a[i, 2, 0]))
        a_lo_y[i] = min(tris_a[i, 0, 1], min(tris_a[i, 1, 1], tris_a[i, 2, 1]))
        a_hi_y[i] = max(tris_a[i, 0, 1], max(tris_a[i, 1, 1], tris_a[i, 2, 1]))

    ax = np.empty(3)
    ay = np.empty(3)
    bx = np.empty(3)
    by = np.empty(3)
    total = 0.0
    for j in range(nb):
        b_lo_x = min(tris_b[j, 0, 0], min(tris_b[j, 1, 0], tris_b[j, 2, 0]))
        b_hi_x = max(tris_b[j, 0, 0], max(tris_b[j, 1, 0], tris_b[j, 2, 0]))
        b_lo_y = min(tris_b[j, 0, 1], min(tris_b[j, 1, 1], tris_b[j, 2, 1]))
        b_hi_y = max(tris_b[j, 0, 1], max(tris_b[j, 1, 1], tris_b[j, 2, 1]))
        for k in range(3):
            bx[k] = tris_b[j, k, 0]
            by[k] = tris_b[j, k, 1]
        for i in range(na):
            if (a_lo_x[i] > b_hi_x or a_hi_x[i] < b_lo_x
                    or a_lo_y[i] > b_hi_y or a_hi_y[i] < b_lo_y):
                continue
            for k in range(3):
                ax[k] = tris_a[i, k, 0]
                ay[k] = tris_a[i, k, 1]
            total += _tri_tri_area(ax, ay, bx, by)
    return total


@njit(cache=True)
def frechet_dp(d2):
    """Discrete Fréchet coupling DP on a squared-distance matrix.

    Returns the squared Fréchet distance; max/min are monotone under
    squaring, so the caller can take one sqrt at the end.
    """
    p, q = d2.shape
    row = np.empty(q)
    row[0] = d2[0, 0]
    for j in range(1, q):
        row[j] = max(row[j - 1], d2[0, j])
    for i in range(1, p):
        diag = row[0]
        row[0] = max(row[0], d2[i, 0])
        for j in range(1, q):
            best = min(diag, row[j], row[j - 1])
            diag = row[j]
            row[j] = max(best, d2[i, j])
    return row[q - 1]
