# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``_pykernels.tgv_iterate``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

BACKEND = "compiled"


cdef void _gen_shrink(double alpha, double beta, double gamma,
                      double x1, double x2, double* y1, double* y2) noexcept nogil:
    # residual form of the shrinkage; see prox.generalized_shrink
    cdef double sm, n, r
    n = alpha * alpha + beta * beta
    if n == 0.0:
        y1[0] = x1
        y2[0] = x2
        return
    sm = alpha * x1 + beta * x2 + gamma
    if sm > n:
        y1[0] = x1 - alpha
        y2[0] = x2 - beta
    elif sm < -n:
        y1[0] = x1 + alpha
        y2[0] = x2 + beta
    else:
        r = sm / n
        y1[0] = x1 - alpha * r
        y2[0] = x2 - beta * r


cdef inline double _dxf(double[:, :, ::1] f, int k, int j, int i, int W) noexcept nogil:
    if i + 1 < W:
        return f[k, j, i + 1] - f[k, j, i]
    return 0.0


cdef inline double _dyf(double[:, :, ::1] f, int k, int j, int i, int H) noexcept nogil:
    if j + 1 < H:
        return f[k, j + 1, i] - f[k, j, i]
    return 0.0


cdef inline double _dxb(double[:, :, ::1] f, int k, int j, int i, int W) noexcept nogil:
    if 1 <= i and i + 1 < W:
        return f[k, j, i] - f[k, j, i - 1]
    return 0.0


cdef inline double _dyb(double[:, :, ::1] f, int k, int j, int i, int H) noexcept nogil:
    if 1 <= j and j + 1 < H:
        return f[k, j, i] - f[k, j - 1, i]
    return 0.0


cdef inline double _dxf_adj(double[:, :, ::1] g, int k, int j, int i, int W) noexcept nogil:
    # transpose of the forward difference with Neumann boundary
    cdef double v = 0.0
    if i < W - 1:
        v -= g[k, j, i]
    if i >= 1 and i - 1 < W - 1:
        v += g[k, j, i - 1]
    return v


cdef inline double _dyf_adj(double[:, :, ::1] g, int k, int j, int i, int H) noexcept nogil:
    cdef double v = 0.0
    if j < H - 1:
        v -= g[k, j, i]
    if j >= 1 and j - 1 < H - 1:
        v += g[k, j - 1, i]
    return v


cdef inline double _dxb_adj(double[:, :, ::1] g, int k, int j, int i, int W) noexcept nogil:
    # transpose of the two-sided-membership backward difference
    cdef double v = 0.0
    if 1 <= i and i + 1 < W:
        v += g[k, j, i]
    if i + 2 < W:
        v -= g[k, j, i + 1]
    return v


cdef inline double _dyb_adj(double[:, :, ::1] g, int k, int j, int i, int H) noexcept nogil:
    cdef double v = 0.0
    if 1 <= j and j + 1 < H:
        v += g[k, j, i]
    if j + 2 < H:
        v -= g[k, j + 1, i]
    return v


def tgv_iterate(cnp.ndarray[double, ndim=2] A_in,
                cnp.ndarray[double, ndim=2] B_in,
                cnp.ndarray[double, ndim=2] c_in,
                double lam1, double lam2, double tau1, double tau2,
                double theta, int n_iters, bint constrain,
                cnp.ndarray[double, ndim=3] u_in,
                cnp.ndarray[double, ndim=3] a_in,
                cnp.ndarray[double, ndim=3] s_in,
                cnp.ndarray[double, ndim=3] t_in,
                cnp.ndarray[double, ndim=3] b1_in,
                cnp.ndarray[double, ndim=3] b2_in,
                cnp.ndarray[double, ndim=3] b1b_in,
                cnp.ndarray[double, ndim=3] b2b_in):
    """Run ``n_iters`` primal-dual steps in place on the state arrays."""
    cdef double[:, ::1] A = np.ascontiguousarray(A_in)
    cdef double[:, ::1] B = np.ascontiguousarray(B_in)
    cdef double[:, ::1] c = np.ascontiguousarray(c_in)
    cdef double[:, :, ::1] u = u_in
    cdef double[:, :, ::1] a = a_in
    cdef double[:, :, ::1] s = s_in
    cdef double[:, :, ::1] t = t_in
    cdef double[:, :, ::1] b1 = b1_in
    cdef double[:, :, ::1] b2 = b2_in
    cdef double[:, :, ::1] b1b = b1b_in
    cdef double[:, :, ::1] b2b = b2b_in

    cdef int H = u_in.shape[1]
    cdef int W = u_in.shape[2]
    cdef int it, j, i, k
    cdef double tt = tau1 * tau2
    cdef double th1 = lam1 / tau2
    cdef double th2 = lam2 / tau2
    cdef double x1, x2, y1, y2, nrm, scale, w0, w1v, w2v, w3v, nb

    gu_np = np.zeros((4, H, W))
    ga_np = np.zeros((6, H, W))
    wrk_np = np.zeros((6, H, W))
    cdef double[:, :, ::1] gu = gu_np
    cdef double[:, :, ::1] ga = ga_np
    cdef double[:, :, ::1] wrk = wrk_np

    with nogil:
        for it in range(n_iters):
            # primal flow update: x = u - tau1*tau2 * grad^T(b1bar),
            # then per-pixel generalized shrinkage
            for j in range(H):
                for i in range(W):
                    x1 = u[0, j, i] - tt * (_dxf_adj(b1b, 0, j, i, W) + _dyf_adj(b1b, 1, j, i, H))
                    x2 = u[1, j, i] - tt * (_dxf_adj(b1b, 2, j, i, W) + _dyf_adj(b1b, 3, j, i, H))
                    _gen_shrink(tau1 * A[j, i], tau1 * B[j, i], tau1 * c[j, i], x1, x2, &y1, &y2)
                    u[0, j, i] = y1
                    u[1, j, i] = y2

            # auxiliary gradient update: a -= tau1*tau2*(symgrad^T(b2bar) - b1bar)
            for j in range(H):
                for i in range(W):
                    wrk[0, j, i] = _dxb_adj(b2b, 0, j, i, W) + 0.5 * _dyb_adj(b2b, 1, j, i, H)
                    wrk[1, j, i] = 0.5 * _dxb_adj(b2b, 1, j, i, W) + _dyb_adj(b2b, 2, j, i, H)
                    wrk[2, j, i] = _dxb_adj(b2b, 3, j, i, W) + 0.5 * _dyb_adj(b2b, 4, j, i, H)
                    wrk[3, j, i] = 0.5 * _dxb_adj(b2b, 4, j, i, W) + _dyb_adj(b2b, 5, j, i, H)
            for k in range(4):
                for j in range(H):
                    for i in range(W):
                        a[k, j, i] -= tt * (wrk[k, j, i] - b1b[k, j, i])

            # split variable s: groupwise shrinkage of b1 + grad(u) - a
            for j in range(H):
                for i in range(W):
                    gu[0, j, i] = _dxf(u, 0, j, i, W)
                    gu[1, j, i] = _dyf(u, 0, j, i, H)
                    gu[2, j, i] = _dxf(u, 1, j, i, W)
                    gu[3, j, i] = _dyf(u, 1, j, i, H)
                    w0 = b1[0, j, i] + gu[0, j, i] - a[0, j, i]
                    w1v = b1[1, j, i] + gu[1, j, i] - a[1, j, i]
                    w2v = b1[2, j, i] + gu[2, j, i] - a[2, j, i]
                    w3v = b1[3, j, i] + gu[3, j, i] - a[3, j, i]
                    if constrain and w0 < 0.0:
                        nrm = sqrt(w1v * w1v + w2v * w2v + w3v * w3v)
                        if nrm <= th1:
                            scale = 0.0
                        else:
                            scale = 1.0 - th1 / nrm
                        s[0, j, i] = 0.0
                        s[1, j, i] = w1v * scale
                        s[2, j, i] = w2v * scale
                        s[3, j, i] = w3v * scale
                    else:
                        nrm = sqrt(w0 * w0 + w1v * w1v + w2v * w2v + w3v * w3v)
                        if nrm <= th1:
                            scale = 0.0
                        else:
                            scale = 1.0 - th1 / nrm
                        s[0, j, i] = w0 * scale
                        s[1, j, i] = w1v * scale
                        s[2, j, i] = w2v * scale
                        s[3, j, i] = w3v * scale

            # split variable t: groupwise shrinkage of b2 + symgrad(a)
            for j in range(H):
                for i in range(W):
                    ga[0, j, i] = _dxb(a, 0, j, i, W)
                    ga[1, j, i] = 0.5 * (_dyb(a, 0, j, i, H) + _dxb(a, 1, j, i, W))
                    ga[2, j, i] = _dyb(a, 1, j, i, H)
                    ga[3, j, i] = _dxb(a, 2, j, i, W)
                    ga[4, j, i] = 0.5 * (_dyb(a, 2, j, i, H) + _dxb(a, 3, j, i, W))
                    ga[5, j, i] = _dyb(a, 3, j, i, H)
                    nrm = 0.0
                    for k in range(6):
                        w0 = b2[k, j, i] + ga[k, j, i]
                        wrk[k, j, i] = w0
                        nrm += w0 * w0
                    nrm = sqrt(nrm)
                    if nrm <= th2:
                        scale = 0.0
                    else:
                        scale = 1.0 - th2 / nrm
                    for k in range(6):
                        t[k, j, i] = wrk[k, j, i] * scale

            # dual ascent and extrapolation
            for k in range(4):
                for j in range(H):
                    for i in range(W):
                        nb = b1[k, j, i] + gu[k, j, i] - a[k, j, i] - s[k, j, i]
                        b1b[k, j, i] = nb + theta * (nb - b1[k, j, i])
                        b1[k, j, i] = nb
            for k in range(6):
                for j in range(H):
                    for i in range(W):
                        nb = b2[k, j, i] + ga[k, j, i] - t[k, j, i]
                        b2b[k, j, i] = nb + theta * (nb - b2[k, j, i])
                        b2[k, j, i] = nb
