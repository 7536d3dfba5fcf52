"""numba-compiled kernels; same contracts as ``_numpy``."""
import math

import numba
import numpy as np

from ._numpy import GAMMA_EPS, GAMMA_MAX_ITER, PADE13, THETA13, VANLOAN_STEP_NORM

_TINY = 1e-300
_jit = numba.njit(cache=True, nogil=True, fastmath=False, error_model="numpy")


@_jit
def expm(M):
    n = M.shape[0]
    norm = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(M[i, j])
        if col > norm:
            norm = col
    if norm == 0.0:
        return np.eye(n)
    s = 0
    if norm > THETA13:
        s = int(math.ceil(math.log2(norm / THETA13)))
    X = np.ascontiguousarray(M) / (2.0**s)
    b = PADE13
    ident = np.eye(n)
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    inner_u = b[13] * X6 + b[11] * X4 + b[9] * X2
    U = X @ (X6 @ inner_u + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * ident)
    inner_v = b[12] * X6 + b[10] * X4 + b[8] * X2
    V = X6 @ inner_v + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * ident
    R = np.ascontiguousarray(np.linalg.solve(V - U, V + U))
    for _ in range(s):
        R = R @ R
    return R


@_jit
def transition_and_noise(A, D, t):
    n = A.shape[0]
    if t == 0.0:
        return np.eye(n), np.zeros((n, n))
    norm = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(A[i, j])
        if col > norm:
            norm = col
    norm *= t
    s = 0
    if norm > VANLOAN_STEP_NORM:
        s = int(math.ceil(math.log2(norm / VANLOAN_STEP_NORM)))
    h = t / (2.0**s)
    C = np.zeros((2 * n, 2 * n))
    for i in range(n):
        for j in range(n):
            C[i, j] = -A[i, j] * h
            C[i, n + j] = D[i, j] * h
            C[n + i, n + j] = A[j, i] * h
    E = expm(C)
    phi = np.ascontiguousarray(E[n:, n:].T)
    Q = phi @ np.ascontiguousarray(E[:n, n:])
    Q = 0.5 * (Q + Q.T)
    for _ in range(s):
        Q = Q + phi @ Q @ phi.T
        Q = 0.5 * (Q + Q.T)
        phi = phi @ phi
    return phi, Q


@_jit
def _gammainc_scalar(a, x):
    if x <= 0.0:
        return 0.0, 1.0
    logpre = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(GAMMA_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * GAMMA_EPS:
                break
        p = total * math.exp(logpre)
        return p, 1.0 - p
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, GAMMA_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < GAMMA_EPS:
            break
    q = h * math.exp(logpre)
    return 1.0 - q, q


@_jit
def _gammainc_flat(a, x):
    P = np.empty(x.size)
    Q = np.empty(x.size)
    for i in range(x.size):
        P[i], Q[i] = _gammainc_scalar(a[i], x[i])
    return P, Q


def gammainc_pair(a, x):
    a, x = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(x, dtype=np.float64))
    P, Q = _gammainc_flat(np.ascontiguousarray(a).ravel(), np.ascontiguousarray(x).ravel())
    return P.reshape(x.shape), Q.reshape(x.shape)


@_jit
def _count_rejections(samples, v0, threshold):
    trials, n = samples.shape
    count = 0
    for k in range(trials):
        mean = 0.0
        for i in range(n):
            mean += samples[k, i]
        mean /= n
        ss = 0.0
        for i in range(n):
            dev = samples[k, i] - mean
            ss += dev * dev
        # (N-1) s^2 / V0 with s^2 = ss / (N-1)
        if ss / v0 > threshold:
            count += 1
    return count


def count_rejections(samples, v0, threshold):
    return int(_count_rejections(np.ascontiguousarray(samples), float(v0), float(threshold)))


@_jit
def _neg_laplacian_kernel_sums(r1, r2, r_c):
    norm = 1.0 / (2.0 * math.sqrt(math.pi) * r_c) ** 3
    total = 0.0
    total_sq = 0.0
    for i in range(r1.shape[0]):
        x2 = 0.0
        for k in range(3):
            dk = r1[i, k] - r2[i, k]
            x2 += dk * dk
        kern = norm * math.exp(-x2 / (4.0 * r_c * r_c))
        v = -kern * (x2 / (4.0 * r_c**4) - 1.5 / (r_c * r_c))
        total += v
        total_sq += v * v
    return total, total_sq


def neg_laplacian_kernel_sums(r1, r2, r_c):
    s, s2 = _neg_laplacian_kernel_sums(np.ascontiguousarray(r1), np.ascontiguousarray(r2), float(r_c))
    return float(s), float(s2)
