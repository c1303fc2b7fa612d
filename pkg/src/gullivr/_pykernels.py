"""Pure-Python fallback for the numerical kernels in ``_ckernels.pyx``.

Both backends expose the same functions with the same argument order and
perform the floating point operations in the same order, so results agree
to the last bit on platforms without fused multiply-add contraction.

Grid convention: ``h[i, j]`` is the height at ``x = x0 + i*cell``,
``z = z0 + j*cell``. Callers are responsible for bounds checks; sampling
clamps to the grid so round-off at the rim cannot index out of range.
"""
import math

import numpy as np


def bilinear(h, x0, z0, cell, x, z):
    nx, nz = h.shape
    tx = (x - x0) / cell
    tz = (z - z0) / cell
    i = min(max(int(math.floor(tx)), 0), nx - 2)
    j = min(max(int(math.floor(tz)), 0), nz - 2)
    fx = min(max(tx - i, 0.0), 1.0)
    fz = min(max(tz - j, 0.0), 1.0)
    h00 = h[i, j]
    h10 = h[i + 1, j]
    h01 = h[i, j + 1]
    h11 = h[i + 1, j + 1]
    return float((h00 * (1.0 - fx) + h10 * fx) * (1.0 - fz) + (h01 * (1.0 - fx) + h11 * fx) * fz)


def convolve(h, w):
    """Separable convolution with a symmetric kernel, renormalized at the rim.

    First pass runs along z, second along x. Each pass divides by the sum of
    the weights that actually landed inside the grid.
    """
    h = np.asarray(h, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    k = (len(w) - 1) // 2
    if k == 0:
        return h.copy()
    nx, nz = h.shape

    acc = np.zeros_like(h)
    norm = np.zeros_like(h)
    for b in range(-k, k + 1):
        lo, hi = max(0, -b), min(nz, nz - b)
        if lo >= hi:
            continue
        acc[:, lo:hi] += w[b + k] * h[:, lo + b:hi + b]
        norm[:, lo:hi] += w[b + k]
    g = acc / norm

    acc = np.zeros_like(h)
    norm = np.zeros_like(h)
    for a in range(-k, k + 1):
        lo, hi = max(0, -a), min(nx, nx - a)
        if lo >= hi:
            continue
        acc[lo:hi, :] += w[a + k] * g[lo + a:hi + a, :]
        norm[lo:hi, :] += w[a + k]
    return acc / norm


def _smoothed_node(h, w, k, i, j):
    nx, nz = h.shape
    acc = 0.0
    norm = 0.0
    for a in range(-k, k + 1):
        ii = i + a
        if ii < 0 or ii >= nx:
            continue
        row = 0.0
        rnorm = 0.0
        for b in range(-k, k + 1):
            jj = j + b
            if jj < 0 or jj >= nz:
                continue
            row += w[b + k] * h[ii, jj]
            rnorm += w[b + k]
        acc += w[a + k] * (row / rnorm)
        norm += w[a + k]
    return acc / norm


def smoothed_at(h, x0, z0, cell, x, z, w):
    """Bilinear sample of ``convolve(h, w)`` without building the full field."""
    k = (len(w) - 1) // 2
    if k == 0:
        return bilinear(h, x0, z0, cell, x, z)
    nx, nz = h.shape
    tx = (x - x0) / cell
    tz = (z - z0) / cell
    i = min(max(int(math.floor(tx)), 0), nx - 2)
    j = min(max(int(math.floor(tz)), 0), nz - 2)
    fx = min(max(tx - i, 0.0), 1.0)
    fz = min(max(tz - j, 0.0), 1.0)
    h00 = _smoothed_node(h, w, k, i, j)
    h10 = _smoothed_node(h, w, k, i + 1, j)
    h01 = _smoothed_node(h, w, k, i, j + 1)
    h11 = _smoothed_node(h, w, k, i + 1, j + 1)
    return float((h00 * (1.0 - fx) + h10 * fx) * (1.0 - fz) + (h01 * (1.0 - fx) + h11 * fx) * fz)


def _bisect_ray(h, x0, z0, cell, ox, oy, oz, dx, dy, dz, a, b, tol):
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if oy + dy * m - bilinear(h, x0, z0, cell, ox + dx * m, oz + dz * m) <= 0.0:
            b = m
        else:
            a = m
    return b


def march_ray(h, x0, z0, cell, ox, oy, oz, dx, dy, dz, s0, s1, step, tol):
    """First ``s`` in ``[s0, s1]`` where the ray is at or below the ground.

    Returns NaN when the ray stays above ground over the whole interval.
    """
    f = oy + dy * s0 - bilinear(h, x0, z0, cell, ox + dx * s0, oz + dz * s0)
    if f <= 0.0:
        return s0
    n = 0
    s = s0
    while s < s1:
        n += 1
        s_next = min(s0 + n * step, s1)
        f = oy + dy * s_next - bilinear(h, x0, z0, cell, ox + dx * s_next, oz + dz * s_next)
        if f <= 0.0:
            return _bisect_ray(h, x0, z0, cell, ox, oy, oz, dx, dy, dz, s, s_next, tol)
        s = s_next
    return math.nan


def _arc_gap(h, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, t):
    y = oy + vy * t - 0.5 * g * t * t
    return y - bilinear(h, x0, z0, cell, ox + vx * t, oz + vz * t)


def march_arc(h, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, t1, dt, tol):
    """First time in ``[0, t1]`` where the ballistic point touches the ground.

    Returns NaN when the arc stays above ground until ``t1``.
    """
    if _arc_gap(h, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, 0.0) <= 0.0:
        return 0.0
    n = 0
    t = 0.0
    while t < t1:
        n += 1
        t_next = min(n * dt, t1)
        if _arc_gap(h, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, t_next) <= 0.0:
            a, b = t, t_next
            while b - a > tol:
                m = 0.5 * (a + b)
                if m <= a or m >= b:
                    break
                if _arc_gap(h, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, m) <= 0.0:
                    b = m
                else:
                    a = m
            return b
        t = t_next
    return math.nan
