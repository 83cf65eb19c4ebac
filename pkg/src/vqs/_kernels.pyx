# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.  Semantics mirror ``vqs._fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def scalar_affine(const double[::1] x, const double[::1] w, const double[::1] b):
    cdef Py_ssize_t G = x.shape[0], H = w.shape[0], g, j
    out = np.empty((G, H), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double xg
    with nogil:
        for g in range(G):
            xg = x[g]
            for j in range(H):
                o[g, j] = xg * w[j] + b[j]
    return out


def relu_forward(z):
    cdef const double[::1] zf = np.ascontiguousarray(z, dtype=np.float64).reshape(-1)
    out = np.empty(np.shape(z), dtype=np.float64)
    cdef double[::1] o = out.reshape(-1)
    cdef Py_ssize_t i, n = zf.shape[0]
    cdef double v
    with nogil:
        for i in range(n):
            v = zf[i]
            # NaN passes through, as with np.maximum
            o[i] = 0.0 if v <= 0.0 else v
    return out


def relu_backward(grad, out):
    cdef const double[::1] gf = np.ascontiguousarray(grad, dtype=np.float64).reshape(-1)
    cdef const double[::1] of = np.ascontiguousarray(out, dtype=np.float64).reshape(-1)
    res = np.empty(np.shape(out), dtype=np.float64)
    cdef double[::1] r = res.reshape(-1)
    cdef Py_ssize_t i, n = of.shape[0]
    with nogil:
        for i in range(n):
            r[i] = gf[i] if of[i] > 0.0 else 0.0
    return res


def jacobi_sweep(double[:, ::1] A, double[:, ::1] V):
    cdef Py_ssize_t n = A.shape[0], p, q, k
    cdef double apq, app, aqq, g, tau, t, c, s, x, y
    cdef long rotations = 0
    with nogil:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                g = 100.0 * fabs(apq)
                if fabs(app) + g == fabs(app) and fabs(aqq) + g == fabs(aqq):
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                tau = (aqq - app) / (2.0 * apq)
                if fabs(tau) > 1e150:
                    t = 0.5 / tau
                elif tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    x = A[k, p]
                    y = A[k, q]
                    A[k, p] = c * x - s * y
                    A[k, q] = s * x + c * y
                for k in range(n):
                    x = A[p, k]
                    y = A[q, k]
                    A[p, k] = c * x - s * y
                    A[q, k] = s * x + c * y
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    x = V[k, p]
                    y = V[k, q]
                    V[k, p] = c * x - s * y
                    V[k, q] = s * x + c * y
                rotations += 1
    return rotations


def tridiag_solve(lower, diag, upper, rhs):
    cdef const double[::1] lo = np.ascontiguousarray(lower, dtype=np.float64)
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] up = np.ascontiguousarray(upper, dtype=np.float64)
    cdef const double[::1] r = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0], i
    cp_arr = np.zeros(n, dtype=np.float64)
    dp_arr = np.zeros(n, dtype=np.float64)
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] cp = cp_arr
    cdef double[::1] dp = dp_arr
    cdef double[::1] x = out
    cdef double beta
    with nogil:
        beta = d[0]
        if n > 1:
            cp[0] = up[0] / beta
        dp[0] = r[0] / beta
        for i in range(1, n):
            beta = d[i] - lo[i - 1] * cp[i - 1]
            if i < n - 1:
                cp[i] = up[i] / beta
            dp[i] = (r[i] - lo[i - 1] * dp[i - 1]) / beta
        x[n - 1] = dp[n - 1]
        for i in range(n - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
    return out
