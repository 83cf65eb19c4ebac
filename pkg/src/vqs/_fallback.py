"""Pure-Python/numpy implementations of the hot kernels.

Semantics match ``vqs._kernels`` exactly; the compiled module is preferred
when it is importable.
"""
import math

import numpy as np


def scalar_affine(x, w, b):
    """out[g, j] = x[g] * w[j] + b[j]."""
    out = np.multiply.outer(x, w)
    out += b
    return out


def relu_forward(z):
    return np.maximum(z, 0.0)


def relu_backward(grad, out):
    """Gradient through ReLU given its output; zero where ``out == 0``."""
    return np.where(out > 0.0, grad, 0.0)


def jacobi_sweep(A, V):
    """One cyclic-by-row sweep of Jacobi rotations, in place on ``A`` and ``V``.

    Returns the number of rotations applied.
    """
    n = A.shape[0]
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = A[p, q]
            if apq == 0.0:
                continue
            app = A[p, p]
            aqq = A[q, q]
            g = 100.0 * abs(apq)
            if abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                # below rounding of both diagonal entries
                A[p, q] = 0.0
                A[q, p] = 0.0
                continue
            tau = (aqq - app) / (2.0 * apq)
            if abs(tau) > 1e150:
                t = 0.5 / tau
            elif tau >= 0.0:
                t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
            else:
                t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            col_p = A[:, p].copy()
            col_q = A[:, q].copy()
            A[:, p] = c * col_p - s * col_q
            A[:, q] = s * col_p + c * col_q
            row_p = A[p, :].copy()
            row_q = A[q, :].copy()
            A[p, :] = c * row_p - s * row_q
            A[q, :] = s * row_p + c * row_q
            A[p, p] = app - t * apq
            A[q, q] = aqq + t * apq
            A[p, q] = 0.0
            A[q, p] = 0.0
            vp = V[:, p].copy()
            vq = V[:, q].copy()
            V[:, p] = c * vp - s * vq
            V[:, q] = s * vp + c * vq
            rotations += 1
    return rotations


def tridiag_solve(lower, diag, upper, rhs):
    """Thomas algorithm for a tridiagonal system without pivoting.

    ``lower[i]`` couples row i+1 to column i, ``upper[i]`` row i to column i+1.
    """
    n = len(diag)
    cp = [0.0] * n
    dp = [0.0] * n
    beta = diag[0]
    cp[0] = upper[0] / beta if n > 1 else 0.0
    dp[0] = rhs[0] / beta
    for i in range(1, n):
        beta = diag[i] - lower[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = upper[i] / beta
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / beta
    x = [0.0] * n
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.array(x)
