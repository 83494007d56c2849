# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scheme kernels; same signatures and results as _kernels_py."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()


def second_differences(const double[::1] u, const Py_ssize_t[:, :, ::1] pidx, const double[:, :, ::1] pw,
                       const double[:, ::1] plen, const Py_ssize_t[:, :, ::1] midx,
                       const double[:, :, ::1] mw, const double[:, ::1] mlen, const double[::1] u0):
    cdef Py_ssize_t D = plen.shape[0], M = plen.shape[1], d, m
    cdef double up, um, a, b
    out = np.empty((D, M))
    cdef double[:, ::1] dd = out
    for d in range(D):
        for m in range(M):
            up = pw[d, m, 0] * u[pidx[d, m, 0]] + pw[d, m, 1] * u[pidx[d, m, 1]]
            um = mw[d, m, 0] * u[midx[d, m, 0]] + mw[d, m, 1] * u[midx[d, m, 1]]
            a = plen[d, m]
            b = mlen[d, m]
            dd[d, m] = 2.0 / (a + b) * ((up - u0[m]) / a + (um - u0[m]) / b)
    return out


def interior_residual(const double[::1] u, const Py_ssize_t[::1] nodes, const Py_ssize_t[:, :, ::1] pidx,
                      const double[:, :, ::1] pw, const double[:, ::1] plen,
                      const Py_ssize_t[:, :, ::1] midx, const double[:, :, ::1] mw,
                      const double[:, ::1] mlen, const Py_ssize_t[:, ::1] pairs,
                      const double[::1] f0, const double[::1] f1, double delta):
    cdef Py_ssize_t D = plen.shape[0], M = plen.shape[1], P = pairs.shape[0]
    cdef Py_ssize_t d, m, k, kd, kp
    cdef double up, um, a, b, c, lam, det, prod, pa, pb, ma
    res_arr = np.empty(M)
    br_arr = np.empty(M, dtype=np.intp)
    dd_arr = np.empty((D, M))
    cdef double[::1] res = res_arr
    cdef Py_ssize_t[::1] br = br_arr
    cdef double[:, ::1] dd = dd_arr
    for m in range(M):
        c = u[nodes[m]]
        lam = INFINITY
        kd = 0
        for d in range(D):
            up = pw[d, m, 0] * u[pidx[d, m, 0]] + pw[d, m, 1] * u[pidx[d, m, 1]]
            um = mw[d, m, 0] * u[midx[d, m, 0]] + mw[d, m, 1] * u[midx[d, m, 1]]
            a = plen[d, m]
            b = mlen[d, m]
            dd[d, m] = 2.0 / (a + b) * ((up - c) / a + (um - c) / b)
            if dd[d, m] < lam:
                lam = dd[d, m]
                kd = d
        det = INFINITY
        kp = 0
        for k in range(P):
            pa = dd[pairs[k, 0], m]
            pb = dd[pairs[k, 1], m]
            prod = (pa if pa > 0 else 0.0) * (pb if pb > 0 else 0.0)
            if prod < det:
                det = prod
                kp = k
        ma = -f1[m] * det + f0[m]
        if ma >= -lam:
            res[m] = ma - delta
            br[m] = kp
        else:
            res[m] = -lam - delta
            br[m] = -(kd + 1)
    return res_arr, br_arr, dd_arr


def boundary_residual(const double[::1] u, const Py_ssize_t[::1] bnodes, const Py_ssize_t[:, :, ::1] nbrs,
                      const double[:, ::1] normals, const double[::1] sigma, double h, double delta):
    cdef Py_ssize_t B = bnodes.shape[0], K = normals.shape[0], b, k, i, side, nb
    cdef double u0, val, ni
    cdef bint ok
    best_arr = np.empty(B)
    arg_arr = np.empty(B, dtype=np.intp)
    cdef double[::1] best = best_arr
    cdef Py_ssize_t[::1] arg = arg_arr
    for b in range(B):
        u0 = u[bnodes[b]]
        best[b] = -INFINITY
        arg[b] = -1
        for k in range(K):
            val = -sigma[k]
            ok = True
            for i in range(2):
                ni = normals[k, i]
                if ni == 0.0:
                    continue
                side = 0 if ni > 0 else 1
                nb = nbrs[b, i, side]
                if nb < 0:
                    ok = False
                    break
                val += fabs(ni) * (u0 - u[nb]) / h
            if ok and val > best[b]:
                best[b] = val
                arg[b] = k
        best[b] -= delta
    return best_arr, arg_arr


def lower_hull(const double[::1] x, const double[::1] g):
    cdef Py_ssize_t N = x.shape[0], i, top = 0, a, b
    hull_arr = np.empty(N, dtype=np.intp)
    cdef Py_ssize_t[::1] hull = hull_arr
    for i in range(N):
        while top >= 2:
            a = hull[top - 2]
            b = hull[top - 1]
            if (g[b] - g[a]) * (x[i] - x[a]) >= (g[i] - g[a]) * (x[b] - x[a]):
                top -= 1
            else:
                break
        hull[top] = i
        top += 1
    return hull_arr[:top].copy()
