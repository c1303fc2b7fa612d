# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``_pykernels`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, NAN

cnp.import_array()


cdef inline double _bilinear(const double[:, ::1] h, double x0, double z0, double cell,
                             double x, double z) noexcept nogil:
    cdef Py_ssize_t nx = h.shape[0], nz = h.shape[1]
    cdef double tx = (x - x0) / cell
    cdef double tz = (z - z0) / cell
    cdef Py_ssize_t i = <Py_ssize_t>floor(tx)
    cdef Py_ssize_t j = <Py_ssize_t>floor(tz)
    if i < 0:
        i = 0
    if i > nx - 2:
        i = nx - 2
    if j < 0:
        j = 0
    if j > nz - 2:
        j = nz - 2
    cdef double fx = tx - i
    cdef double fz = tz - j
    if fx < 0.0:
        fx = 0.0
    if fx > 1.0:
        fx = 1.0
    if fz < 0.0:
        fz = 0.0
    if fz > 1.0:
        fz = 1.0
    return ((h[i, j] * (1.0 - fx) + h[i + 1, j] * fx) * (1.0 - fz)
            + (h[i, j + 1] * (1.0 - fx) + h[i + 1, j + 1] * fx) * fz)


def bilinear(h, double x0, double z0, double cell, double x, double z):
    cdef const double[:, ::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    return _bilinear(hv, x0, z0, cell, x, z)


def convolve(h, w):
    cdef const double[:, ::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t k = (wv.shape[0] - 1) // 2
    if k == 0:
        return np.array(hv, dtype=np.float64)
    cdef Py_ssize_t nx = hv.shape[0], nz = hv.shape[1]
    g_arr = np.empty((nx, nz), dtype=np.float64)
    out_arr = np.empty((nx, nz), dtype=np.float64)
    cdef double[:, ::1] g = g_arr
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, a, b, ii, jj
    cdef double acc, norm
    with nogil:
        for i in range(nx):
            for j in range(nz):
                acc = 0.0
                norm = 0.0
                for b in range(-k, k + 1):
                    jj = j + b
                    if jj < 0 or jj >= nz:
                        continue
                    acc = acc + wv[b + k] * hv[i, jj]
                    norm = norm + wv[b + k]
                g[i, j] = acc / norm
        for i in range(nx):
            for j in range(nz):
                acc = 0.0
                norm = 0.0
                for a in range(-k, k + 1):
                    ii = i + a
                    if ii < 0 or ii >= nx:
                        continue
                    acc = acc + wv[a + k] * g[ii, j]
                    norm = norm + wv[a + k]
                out[i, j] = acc / norm
    return out_arr


cdef double _smoothed_node(const double[:, ::1] h, const double[::1] w, Py_ssize_t k,
                           Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t nx = h.shape[0], nz = h.shape[1]
    cdef Py_ssize_t a, b, ii, jj
    cdef double acc = 0.0, norm = 0.0, row, rnorm
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
            row = row + w[b + k] * h[ii, jj]
            rnorm = rnorm + w[b + k]
        acc = acc + w[a + k] * (row / rnorm)
        norm = norm + w[a + k]
    return acc / norm


def smoothed_at(h, double x0, double z0, double cell, double x, double z, w):
    cdef const double[:, ::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t k = (wv.shape[0] - 1) // 2
    if k == 0:
        return _bilinear(hv, x0, z0, cell, x, z)
    cdef Py_ssize_t nx = hv.shape[0], nz = hv.shape[1]
    cdef double tx = (x - x0) / cell
    cdef double tz = (z - z0) / cell
    cdef Py_ssize_t i = <Py_ssize_t>floor(tx)
    cdef Py_ssize_t j = <Py_ssize_t>floor(tz)
    if i < 0:
        i = 0
    if i > nx - 2:
        i = nx - 2
    if j < 0:
        j = 0
    if j > nz - 2:
        j = nz - 2
    cdef double fx = tx - i
    cdef double fz = tz - j
    fx = 0.0 if fx < 0.0 else (1.0 if fx > 1.0 else fx)
    fz = 0.0 if fz < 0.0 else (1.0 if fz > 1.0 else fz)
    cdef double h00 = _smoothed_node(hv, wv, k, i, j)
    cdef double h10 = _smoothed_node(hv, wv, k, i + 1, j)
    cdef double h01 = _smoothed_node(hv, wv, k, i, j + 1)
    cdef double h11 = _smoothed_node(hv, wv, k, i + 1, j + 1)
    return (h00 * (1.0 - fx) + h10 * fx) * (1.0 - fz) + (h01 * (1.0 - fx) + h11 * fx) * fz


cdef inline double _ray_gap(const double[:, ::1] h, double x0, double z0, double cell,
                            double ox, double oy, double oz, double dx, double dy, double dz,
                            double s) noexcept nogil:
    return oy + dy * s - _bilinear(h, x0, z0, cell, ox + dx * s, oz + dz * s)


cdef double _march_ray(const double[:, ::1] hv, double x0, double z0, double cell,
                       double ox, double oy, double oz, double dx, double dy, double dz,
                       double s0, double s1, double step, double tol) noexcept nogil:
    cdef double s, s_next, a, b, m
    cdef long n = 0
    if _ray_gap(hv, x0, z0, cell, ox, oy, oz, dx, dy, dz, s0) <= 0.0:
        return s0
    s = s0
    while s < s1:
        n += 1
        s_next = s0 + n * step
        if s_next > s1:
            s_next = s1
        if _ray_gap(hv, x0, z0, cell, ox, oy, oz, dx, dy, dz, s_next) <= 0.0:
            a = s
            b = s_next
            while b - a > tol:
                m = 0.5 * (a + b)
                if m <= a or m >= b:
                    break
                if _ray_gap(hv, x0, z0, cell, ox, oy, oz, dx, dy, dz, m) <= 0.0:
                    b = m
                else:
                    a = m
            return b
        s = s_next
    return NAN


def march_ray(h, double x0, double z0, double cell, double ox, double oy, double oz,
              double dx, double dy, double dz, double s0, double s1, double step, double tol):
    cdef const double[:, ::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef double r
    with nogil:
        r = _march_ray(hv, x0, z0, cell, ox, oy, oz, dx, dy, dz, s0, s1, step, tol)
    return r


cdef inline double _arc_gap(const double[:, ::1] h, double x0, double z0, double cell,
                            double ox, double oy, double oz, double vx, double vy, double vz,
                            double g, double t) noexcept nogil:
    cdef double y = oy + vy * t - 0.5 * g * t * t
    return y - _bilinear(h, x0, z0, cell, ox + vx * t, oz + vz * t)


cdef double _march_arc(const double[:, ::1] hv, double x0, double z0, double cell,
                       double ox, double oy, double oz, double vx, double vy, double vz,
                       double g, double t1, double dt, double tol) noexcept nogil:
    cdef double t, t_next, a, b, m
    cdef long n = 0
    if _arc_gap(hv, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, 0.0) <= 0.0:
        return 0.0
    t = 0.0
    while t < t1:
        n += 1
        t_next = n * dt
        if t_next > t1:
            t_next = t1
        if _arc_gap(hv, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, t_next) <= 0.0:
            a = t
            b = t_next
            while b - a > tol:
                m = 0.5 * (a + b)
                if m <= a or m >= b:
                    break
                if _arc_gap(hv, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, m) <= 0.0:
                    b = m
                else:
                    a = m
            return b
        t = t_next
    return NAN


def march_arc(h, double x0, double z0, double cell, double ox, double oy, double oz,
              double vx, double vy, double vz, double g, double t1, double dt, double tol):
    cdef const double[:, ::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef double r
    with nogil:
        r = _march_arc(hv, x0, z0, cell, ox, oy, oz, vx, vy, vz, g, t1, dt, tol)
    return r
