"""Chi-squared variance test, error probabilities and fidelity bounds."""
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import kernels
from .errors import InvalidArgumentError, NumericalError
from .gaussian import check_physicality, symplectic_form
from .model import QuadratureSelector

QUANTILE_MAX_ITER = 200


def _gamma_args(a, x):
    a = np.asarray(a, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(a > 0)) or np.any(~(x >= 0)):
        raise InvalidArgumentError("regularized gamma needs a > 0 and x >= 0")
    return a, x


def _scalarize(value, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(value)
    return value


def regularized_gamma_upper(a, x):
    """``Q(a, x) = Gamma(a, x) / Gamma(a)``; series below ``x = a + 1``, continued fraction above."""
    a, x = _gamma_args(a, x)
    return _scalarize(kernels.gammainc_pair(a, x)[1], a, x)


def regularized_gamma_lower(a, x):
    a, x = _gamma_args(a, x)
    return _scalarize(kernels.gammainc_pair(a, x)[0], a, x)


def chi2_cdf(x, dof):
    x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
    return regularized_gamma_lower(0.5 * dof, 0.5 * x)


def chi2_sf(x, dof):
    x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
    return regularized_gamma_upper(0.5 * dof, 0.5 * x)


def _chi2_logpdf(x, dof):
    k = 0.5 * dof
    return (k - 1.0) * math.log(x) - 0.5 * x - k * math.log(2.0) - math.lgamma(k)


def chi2_quantile(p, dof):
    """Inverse chi-squared CDF by bracketing plus safeguarded Newton steps."""
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p!r}")
    if int(dof) != dof or dof < 1:
        raise InvalidArgumentError(f"dof must be a positive integer, got {dof!r}")
    # Wilson-Hilferty start, clipped to the positive axis
    z = math.sqrt(2.0) * _erfinv(2.0 * p - 1.0)
    c = 2.0 / (9.0 * dof)
    x = max(dof * (1.0 - c + z * math.sqrt(c)) ** 3, 1e-8)

    lo, hi = 0.0, max(2.0 * x, 1.0)
    while chi2_cdf(hi, dof) < p:
        hi *= 2.0
        if hi > 1e12:
            raise NumericalError("could not bracket chi-squared quantile")
    x = min(max(x, lo), hi)
    for _ in range(QUANTILE_MAX_ITER):
        f = chi2_cdf(x, dof) - p
        if f == 0.0:
            return x
        if f > 0:
            hi = x
        else:
            lo = x
        step = f / math.exp(_chi2_logpdf(x, dof)) if x > 0 else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * max(x, 1e-300) or hi - lo <= 1e-15 * hi:
            return x_new
        x = x_new
    raise NumericalError(f"chi2_quantile did not converge for p={p}, dof={dof}")


def _erfinv(y):
    # Newton on math.erf; only needs to seed chi2_quantile
    if y <= -1.0 or y >= 1.0:
        return math.copysign(6.0, y)
    x = 0.0
    for _ in range(60):
        err = math.erf(x) - y
        x -= err / (2.0 / math.sqrt(math.pi) * math.exp(-x * x))
        if abs(err) < 1e-15:
            break
    return x


class Decision(str, enum.Enum):
    ACCEPT_H0 = "accept_h0"
    REJECT_H0 = "reject_h0"


@dataclass(frozen=True)
class TestConfig:
    """Sample size, significance level and the two hypothesis variances."""

    __test__ = False  # keep pytest from collecting this class

    N: int
    significance: float = 0.05
    selector: QuadratureSelector = QuadratureSelector.Q_PLUS
    V0: float = 1.0
    V1: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InvalidArgumentError(f"N must be an integer >= 2, got {self.N!r}")
        if not 0.0 < self.significance < 1.0:
            raise InvalidArgumentError(f"significance must lie in (0, 1), got {self.significance!r}")
        if not (self.V0 > 0 and self.V1 > 0):
            raise InvalidArgumentError("V0 and V1 must be > 0")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "selector", QuadratureSelector(self.selector))

    @property
    def dof(self):
        return self.N - 1

    def threshold(self):
        return chi2_quantile(1.0 - self.significance, self.dof)


@dataclass(frozen=True)
class HypothesisOutcome:
    decision: Decision
    t_star: float
    quantile: float


def decide(t_star, cfg):
    """One-tailed test: reject H0 when ``t_star`` exceeds the ``1 - alpha`` quantile."""
    q = cfg.threshold()
    decision = Decision.REJECT_H0 if t_star > q else Decision.ACCEPT_H0
    return HypothesisOutcome(decision, float(t_star), q)


def test_statistic(samples, V0):
    """``T = (N - 1) s^2 / V0`` with the unbiased sample variance."""
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.shape[-1]
    return (n - 1) * samples.var(axis=-1, ddof=1) / V0


class ErrorProbability(NamedTuple):
    p_err: float
    type_i: float
    type_ii: float


def error_probability_from_variances(V0, V1, N, significance):
    """Vectorised mean error probability for equal priors.

    ``type_i = Q((N-1)/2, q/2)`` and ``type_ii = 1 - Q((N-1)/2, q V0 / (2 V1))``
    with ``q`` the ``1 - alpha`` chi-squared quantile. ``V0`` and ``V1`` may be
    arrays.
    """
    V0 = np.asarray(V0, dtype=np.float64)
    V1 = np.asarray(V1, dtype=np.float64)
    if np.any(~(V0 > 0)) or np.any(~(V1 > 0)):
        raise InvalidArgumentError("variances must be > 0")
    q = chi2_quantile(1.0 - significance, N - 1)
    k = 0.5 * (N - 1)
    type_i = kernels.gammainc_pair(k, 0.5 * q)[1]
    _, upper = kernels.gammainc_pair(np.full(np.broadcast(V0, V1).shape, k), 0.5 * q * V0 / V1)
    type_ii = 1.0 - upper
    p_err = 0.5 * (1.0 - upper + type_i)
    return ErrorProbability(
        _scalarize(p_err, V0, V1),
        float(type_i),
        _scalarize(type_ii, V0, V1),
    )


def error_probability(cfg):
    return error_probability_from_variances(cfg.V0, cfg.V1, cfg.N, cfg.significance)


def _sqrtm_general(M):
    # principal square root through the eigendecomposition; M here is
    # similar to a positive matrix so its eigenvalues are real and > 0
    w, V = np.linalg.eig(M)
    return (V * np.sqrt(w.astype(complex))) @ np.linalg.inv(V)


def _joint_normal_form(Va, Vb, omega):
    """Map both CMs by the symplectic S^{-1} that brings (Va + Vb) / 2 to Williamson form.

    Fidelity is invariant under joint symplectic congruence; doing this first
    keeps the auxiliary-matrix algebra well conditioned for squeezed inputs.
    """
    w, U = np.linalg.eigh(0.5 * (Va + Vb))
    m_inv_half = (U / np.sqrt(w)) @ U.T
    T, O = scipy.linalg.schur(m_inv_half @ omega @ m_inv_half, output="real")
    d = np.empty(len(w) // 2)
    for k in range(len(d)):
        d[k] = T[2 * k, 2 * k + 1]
        if d[k] < 0:
            O[:, [2 * k, 2 * k + 1]] = O[:, [2 * k + 1, 2 * k]]
            d[k] = -d[k]
    s_inv = (O.T @ m_inv_half) / np.repeat(np.sqrt(d), 2)[:, None]
    a = s_inv @ Va @ s_inv.T
    b = s_inv @ Vb @ s_inv.T
    return 0.5 * (a + a.T), 0.5 * (b + b.T)


def gaussian_fidelity(Va, Vb, check=True):
    """Squared Uhlmann fidelity of two zero-mean Gaussian states.

    Built from the auxiliary matrix
    ``V_aux = Omega^T (Va + Vb)^{-1} (Omega / 4 + Vb Omega Va)`` as

        F = (det[2 (sqrt(1 + (V_aux Omega)^{-2} / 4) + 1) V_aux] / det(Va + Vb))^{1/2}

    with vacuum covariance ``I / 2``. Returns a value in ``[0, 1]``.
    """
    Va = np.asarray(Va, dtype=np.float64)
    Vb = np.asarray(Vb, dtype=np.float64)
    if Va.shape != Vb.shape or Va.ndim != 2 or Va.shape[0] != Va.shape[1]:
        raise InvalidArgumentError(f"covariance shapes differ or are not square: {Va.shape}, {Vb.shape}")
    if check:
        for name, V in (("Va", Va), ("Vb", Vb)):
            ok, worst = check_physicality(V)
            if not ok:
                raise InvalidArgumentError(f"{name} is not a physical covariance (min eigenvalue {worst:.3e})")
    n = Va.shape[0]
    omega = symplectic_form(n // 2)
    Va, Vb = _joint_normal_form(Va, Vb, omega)
    total = Va + Vb
    aux = omega.T @ np.linalg.solve(total, omega / 4.0 + Vb @ omega @ Va)
    X = aux @ omega
    ident = np.eye(n)
    root = _sqrtm_general(ident + 0.25 * np.linalg.inv(X @ X))
    _, logdet_num = np.linalg.slogdet(2.0 * (root + ident) @ aux)
    sign, logdet_den = np.linalg.slogdet(total)
    if sign <= 0:
        raise InvalidArgumentError("Va + Vb is not positive definite")
    F = math.exp(0.5 * (float(np.real(logdet_num)) - logdet_den))
    return min(max(F, 0.0), 1.0)


def classical_bound(F, N):
    """Lower bound on any classical-input error probability, ``(1 - sqrt(1 - F^N)) / 2``."""
    F = np.asarray(F, dtype=np.float64)
    if np.any(F < 0) or np.any(F > 1 + 1e-12):
        raise InvalidArgumentError("fidelity must lie in [0, 1]")
    if np.any(np.asarray(N) < 1):
        raise InvalidArgumentError("N must be >= 1")
    FN = np.clip(F, 0.0, 1.0) ** N
    C = 0.5 * (1.0 - np.sqrt(np.maximum(1.0 - FN, 0.0)))
    return float(C) if C.ndim == 0 else C


def quantum_advantage(C, P_err):
    """Signed advantage in percent, ``100 (C - P_err) / (C + P_err)``."""
    C = np.asarray(C, dtype=np.float64)
    P = np.asarray(P_err, dtype=np.float64)
    denom = C + P
    if np.any(denom <= 0):
        raise InvalidArgumentError("advantage undefined when C + P_err == 0")
    out = 100.0 * (C - P) / denom
    return float(out) if out.ndim == 0 else out
