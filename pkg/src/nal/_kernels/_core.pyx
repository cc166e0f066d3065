# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementation of the numerical kernels.

Mirrors nal._kernels._fallback; keep signatures and semantics in sync.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, fabs, fmod, pow, sin, sqrt

cnp.import_array()

DEF TWO_PI = 6.283185307179586


cdef inline double _ipow(double x, long n) noexcept nogil:
    # x**n for integer n >= 0 by squaring
    cdef double r = 1.0
    while n > 0:
        if n & 1:
            r *= x
        x *= x
        n >>= 1
    return r


cdef inline bint _is_int(double p) noexcept nogil:
    return p == <double> (<long> p)


cdef inline double _poww(double x, double p) noexcept nogil:
    if _is_int(p):
        return _ipow(x, <long> p)
    return pow(x, p)


cdef inline double _antider(double a, double b, double t) noexcept nogil:
    return (0.5 * (a * a + b * b) * t
            + 0.25 * (a * a - b * b) * sin(2.0 * t)
            - 0.5 * a * b * cos(2.0 * t))


def gauge_max_abs(double[:, ::1] duals, double[:, ::1] pts):
    cdef Py_ssize_t m = duals.shape[0], k = pts.shape[0]
    out_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, l
    cdef double best, v, x, y
    with nogil:
        for i in range(k):
            x = pts[i, 0]
            y = pts[i, 1]
            best = 0.0
            for l in range(m):
                v = fabs(duals[l, 0] * x + duals[l, 1] * y)
                if v > best:
                    best = v
            out[i] = best
    return out_arr


def orbit_grid(double[:, ::1] prims, double[:, ::1] duals,
               double[::1] thetas, double[::1] lams):
    cdef Py_ssize_t m = prims.shape[0], G = thetas.shape[0]
    out_arr = np.empty((G, 2), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    ax_arr = np.empty(m, dtype=np.float64)
    ay_arr = np.empty(m, dtype=np.float64)
    an_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] dxs = ax_arr, dys = ay_arr, ang = an_arr
    cdef Py_ssize_t g, j
    cdef double ct, st, lam, dx, dy, px, py, iplus, v, i2, a0, a1, width
    with nogil:
        for g in range(G):
            ct = cos(thetas[g])
            st = sin(thetas[g])
            lam = lams[g]
            iplus = 0.0
            for j in range(m):
                dx = (duals[j, 0] * ct + duals[j, 1] * st) * lam
                dy = (-duals[j, 0] * st + duals[j, 1] * ct) / lam
                dxs[j] = dx
                dys[j] = dy
                v = dx * dx + dy * dy
                if v > iplus:
                    iplus = v
                px = (prims[j, 0] * ct + prims[j, 1] * st) / lam
                py = (-prims[j, 0] * st + prims[j, 1] * ct) * lam
                ang[j] = atan2(py, px)
            i2 = 0.0
            for j in range(m):
                a0 = ang[j]
                a1 = ang[j + 1] if j + 1 < m else ang[0] + 3.141592653589793
                width = fmod(a1 - a0, TWO_PI)
                if width < 0.0:
                    width += TWO_PI
                i2 += _antider(dxs[j], dys[j], a0 + width) - _antider(dxs[j], dys[j], a0)
            out[g, 0] = i2 * (2.0 / 3.141592653589793)
            out[g, 1] = iplus
    return out_arr


def plateau_poly(double[:, ::1] Y, int[:, ::1] tris, double[:, :, ::1] ginv,
                 double[::1] warea, double[:, ::1] funcs, double[:, ::1] dirs,
                 double p, double a_ks, double b_resh, double c_det,
                 double det_eps):
    cdef Py_ssize_t V = Y.shape[0], n = Y.shape[1]
    cdef Py_ssize_t T = tris.shape[0], m = funcs.shape[0], K = dirs.shape[0]
    grad_arr = np.zeros((V, n), dtype=np.float64)
    cdef double[:, ::1] grad = grad_arr

    b_arr = np.empty((m, 2), dtype=np.float64)
    db_arr = np.empty((m, 2), dtype=np.float64)
    r_arr = np.empty(m, dtype=np.float64)
    du_arr = np.empty((n, 2), dtype=np.float64)
    ddu_arr = np.empty((n, 2), dtype=np.float64)
    cdef double[:, ::1] B = b_arr, dB = db_arr, Du = du_arr, dDu = ddu_arr
    cdef double[::1] r = r_arr

    cdef double energy = 0.0
    cdef Py_ssize_t t, l, q, c, iv, jv, kv
    cdef double g00, g01, g10, g11, w, f0, f1
    cdef double rmax, S, M, val, coef, u, cmax, cq, det, soft
    cdef double gx, gy

    with nogil:
        for t in range(T):
            iv = tris[t, 0]
            jv = tris[t, 1]
            kv = tris[t, 2]
            g00 = ginv[t, 0, 0]
            g01 = ginv[t, 0, 1]
            g10 = ginv[t, 1, 0]
            g11 = ginv[t, 1, 1]
            w = warea[t]
            for c in range(n):
                f0 = Y[jv, c] - Y[iv, c]
                f1 = Y[kv, c] - Y[iv, c]
                Du[c, 0] = f0 * g00 + f1 * g10
                Du[c, 1] = f0 * g01 + f1 * g11
                dDu[c, 0] = 0.0
                dDu[c, 1] = 0.0
            for l in range(m):
                gx = 0.0
                gy = 0.0
                for c in range(n):
                    gx += funcs[l, c] * Du[c, 0]
                    gy += funcs[l, c] * Du[c, 1]
                B[l, 0] = gx
                B[l, 1] = gy
                dB[l, 0] = 0.0
                dB[l, 1] = 0.0

            if b_resh != 0.0:
                rmax = 0.0
                for l in range(m):
                    r[l] = sqrt(B[l, 0] * B[l, 0] + B[l, 1] * B[l, 1])
                    if r[l] > rmax:
                        rmax = r[l]
                if rmax > 0.0:
                    S = 0.0
                    for l in range(m):
                        S += _poww(r[l] / rmax, p)
                    M = rmax * pow(S, 1.0 / p)
                    energy += b_resh * w * M * M
                    for l in range(m):
                        coef = b_resh * 2.0 * w * _poww(r[l] / M, p - 2.0)
                        dB[l, 0] += coef * B[l, 0]
                        dB[l, 1] += coef * B[l, 1]

            if a_ks != 0.0:
                for q in range(K):
                    cmax = 0.0
                    for l in range(m):
                        cq = fabs(B[l, 0] * dirs[q, 0] + B[l, 1] * dirs[q, 1])
                        r[l] = cq
                        if cq > cmax:
                            cmax = cq
                    if cmax <= 0.0:
                        continue
                    S = 0.0
                    for l in range(m):
                        S += _poww(r[l] / cmax, p)
                    M = cmax * pow(S, 1.0 / p)
                    energy += a_ks * (2.0 / K) * w * M * M
                    for l in range(m):
                        cq = B[l, 0] * dirs[q, 0] + B[l, 1] * dirs[q, 1]
                        coef = a_ks * (2.0 / K) * 2.0 * w * _poww(r[l] / M, p - 2.0)
                        dB[l, 0] += coef * cq * dirs[q, 0]
                        dB[l, 1] += coef * cq * dirs[q, 1]

            for l in range(m):
                for c in range(n):
                    dDu[c, 0] += funcs[l, c] * dB[l, 0]
                    dDu[c, 1] += funcs[l, c] * dB[l, 1]

            if c_det != 0.0 and n == 2:
                det = Du[0, 0] * Du[1, 1] - Du[0, 1] * Du[1, 0]
                soft = sqrt(det * det + det_eps * det_eps)
                energy += c_det * w * soft
                coef = c_det * w * det / soft
                dDu[0, 0] += coef * Du[1, 1]
                dDu[1, 1] += coef * Du[0, 0]
                dDu[0, 1] -= coef * Du[1, 0]
                dDu[1, 0] -= coef * Du[0, 1]

            for c in range(n):
                f0 = dDu[c, 0] * g00 + dDu[c, 1] * g01
                f1 = dDu[c, 0] * g10 + dDu[c, 1] * g11
                grad[jv, c] += f0
                grad[kv, c] += f1
                grad[iv, c] -= f0 + f1
    if c_det != 0.0 and n != 2:
        raise ValueError("determinant term requires a planar target")
    return energy, grad_arr
