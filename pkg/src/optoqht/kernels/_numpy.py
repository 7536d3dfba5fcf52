"""Pure-numpy implementations of the hot kernels.

Every function here has a loop-level twin in ``_numba``. Both produce the
same numbers to rounding; the dispatcher in ``kernels/__init__`` picks one.
"""
import math

import numpy as np

# Higham (2005) degree-13 Pade coefficients and the matching norm bound.
PADE13 = np.array(
    [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ]
)
THETA13 = 5.371920351148152

# Van Loan blocks are exponentiated at a step where ||A h||_1 <= this value;
# longer horizons are reached by exact doubling.
VANLOAN_STEP_NORM = 0.5

GAMMA_EPS = 1e-16
GAMMA_MAX_ITER = 2000
_TINY = 1e-300


def expm(M):
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    norm = np.abs(M).sum(axis=0).max()
    if norm == 0.0:
        return np.eye(n)
    s = 0
    if norm > THETA13:
        s = int(math.ceil(math.log2(norm / THETA13)))
    X = M / (2.0**s)
    b = PADE13
    ident = np.eye(n)
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    U = X @ (
        X6 @ (b[13] * X6 + b[11] * X4 + b[9] * X2)
        + b[7] * X6
        + b[5] * X4
        + b[3] * X2
        + b[1] * ident
    )
    V = (
        X6 @ (b[12] * X6 + b[10] * X4 + b[8] * X2)
        + b[6] * X6
        + b[4] * X4
        + b[2] * X2
        + b[0] * ident
    )
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


def transition_and_noise(A, D, t):
    """Return ``(e^{At}, int_0^t e^{As} D e^{A^T s} ds)``.

    The pair is obtained from one Van Loan block exponential at a short step
    ``h = t / 2**s`` followed by ``s`` exact doublings
    ``Q(2h) = Q(h) + Phi(h) Q(h) Phi(h)^T``. Exponentiating the full
    horizon directly would overflow through the ``e^{-A^T t}`` block.
    """
    A = np.asarray(A, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64)
    n = A.shape[0]
    if t == 0.0:
        return np.eye(n), np.zeros((n, n))
    norm = np.abs(A).sum(axis=0).max() * t
    s = 0
    if norm > VANLOAN_STEP_NORM:
        s = int(math.ceil(math.log2(norm / VANLOAN_STEP_NORM)))
    h = t / (2.0**s)
    C = np.zeros((2 * n, 2 * n))
    C[:n, :n] = -A * h
    C[:n, n:] = D * h
    C[n:, n:] = A.T * h
    E = expm(C)
    phi = E[n:, n:].T.copy()
    Q = phi @ E[:n, n:]
    Q = 0.5 * (Q + Q.T)
    for _ in range(s):
        Q = Q + phi @ Q @ phi.T
        Q = 0.5 * (Q + Q.T)
        phi = phi @ phi
    return phi, Q


def _log_prefactor(a, x):
    # log(x^a e^{-x} / Gamma(a)); x > 0 only
    lg = np.vectorize(math.lgamma, otypes=[np.float64])(a)
    return a * np.log(x) - x - lg


def _series_p(a, x):
    """Lower regularized gamma by its power series (use for x < a + 1)."""
    ap = a.copy()
    term = 1.0 / a
    total = term.copy()
    active = np.ones(a.shape, dtype=bool)
    for _ in range(GAMMA_MAX_ITER):
        if not active.any():
            break
        ap = np.where(active, ap + 1.0, ap)
        term = np.where(active, term * x / ap, term)
        total = np.where(active, total + term, total)
        active &= np.abs(term) >= np.abs(total) * GAMMA_EPS
    return total * np.exp(_log_prefactor(a, x))


def _cf_q(a, x):
    """Upper regularized gamma by modified Lentz continued fraction (x >= a + 1)."""
    b = x + 1.0 - a
    c = np.full(a.shape, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(a.shape, dtype=bool)
    for i in range(1, GAMMA_MAX_ITER + 1):
        if not active.any():
            break
        an = -i * (i - a)
        b = b + 2.0
        d_new = an * d + b
        d_new = np.where(np.abs(d_new) < _TINY, _TINY, d_new)
        c_new = b + an / c
        c_new = np.where(np.abs(c_new) < _TINY, _TINY, c_new)
        d_new = 1.0 / d_new
        delta = d_new * c_new
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= GAMMA_EPS
    return h * np.exp(_log_prefactor(a, x))


def gammainc_pair(a, x):
    """Return ``(P(a, x), Q(a, x))`` elementwise; broadcasts ``a`` and ``x``."""
    a, x = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(x, dtype=np.float64))
    a = a.astype(np.float64).ravel()
    xf = x.astype(np.float64).ravel()
    P = np.zeros_like(xf)
    Q = np.ones_like(xf)
    pos = xf > 0.0
    use_series = pos & (xf < a + 1.0)
    use_cf = pos & ~use_series
    if use_series.any():
        p = _series_p(a[use_series], xf[use_series])
        P[use_series] = p
        Q[use_series] = 1.0 - p
    if use_cf.any():
        q = _cf_q(a[use_cf], xf[use_cf])
        Q[use_cf] = q
        P[use_cf] = 1.0 - q
    return P.reshape(x.shape), Q.reshape(x.shape)


def count_rejections(samples, v0, threshold):
    """Count rows whose chi-squared statistic (N-1) s^2 / V0 exceeds ``threshold``."""
    n = samples.shape[1]
    s2 = samples.var(axis=1, ddof=1)
    return int(np.count_nonzero((n - 1) * s2 / v0 > threshold))


def neg_laplacian_kernel_sums(r1, r2, r_c):
    """Sum and sum of squares of ``-lap K(r1 - r2)`` for the CSL Gaussian kernel."""
    d = r1 - r2
    x2 = np.einsum("ij,ij->i", d, d)
    k = np.exp(-x2 / (4.0 * r_c**2)) / (2.0 * math.sqrt(math.pi) * r_c) ** 3
    v = -k * (x2 / (4.0 * r_c**4) - 1.5 / r_c**2)
    return float(v.sum()), float((v * v).sum())
