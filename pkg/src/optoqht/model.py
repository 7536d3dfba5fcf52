"""Linearised two-cavity optomechanical model.

Mode ordering is ``(Q, P, X1, Y1, X2, Y2)``: mechanical quadratures, then
cavity 1 (with the movable mirror), then cavity 2. Docstrings quote matrix
elements 1-based (``sigma_33`` is ``sigma[2, 2]``) to match that ordering.
"""
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import C_LIGHT, HBAR, K_B, TWO_PI
from .errors import InvalidArgumentError
from .gaussian import lyapunov_steady_state

MECHANICAL_QUALITY = 1e5

REFERENCE = {
    "omega_m": TWO_PI * 2.75e5,
    "T_bath": 1e-3,
    "omega_c": TWO_PI * 9.4e5 * C_LIGHT,
    "kappa": 5e7,
    "P_pump": 4e-3,
    "m": 150e-12,
    "L": 25e-3,
    "R_sphere": 1e-6,
}


class Occupation(str, enum.Enum):
    HIGH_TEMPERATURE = "high_temperature"
    BOSE = "bose"


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters; every rate is in rad/s.

    Defaults reproduce the reference set-up: ``gamma_m = omega_m / 1e5``
    (mechanical Q of 1e5), ``delta = 4 kappa``, ``kappa`` read as an angular
    rate.
    """

    omega_m: float = REFERENCE["omega_m"]
    gamma_m: float = REFERENCE["omega_m"] / MECHANICAL_QUALITY
    T_bath: float = REFERENCE["T_bath"]
    omega_c: float = REFERENCE["omega_c"]
    kappa: float = REFERENCE["kappa"]
    delta: float = 4.0 * REFERENCE["kappa"]
    P_pump: float = REFERENCE["P_pump"]
    m: float = REFERENCE["m"]
    L: float = REFERENCE["L"]
    R_sphere: float = REFERENCE["R_sphere"]
    occupation: Occupation = Occupation.HIGH_TEMPERATURE

    def __post_init__(self):
        positive = ("omega_m", "gamma_m", "omega_c", "kappa", "delta", "m", "L", "R_sphere")
        for name in positive:
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("T_bath", "P_pump"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise InvalidArgumentError(f"{name} must be finite and >= 0, got {value!r}")
        object.__setattr__(self, "occupation", Occupation(self.occupation))

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def epsilon(self):
        return derived_coupling(self)[0]

    @property
    def chi(self):
        return derived_coupling(self)[1]

    @property
    def g(self):
        return derived_coupling(self)[2]

    @property
    def alpha(self):
        return cavity_amplitude(self)

    @property
    def thermal_diffusion(self):
        """Brownian momentum diffusion ``2 gamma_m k_B T / (hbar omega_m)``."""
        return 2.0 * self.gamma_m * K_B * self.T_bath / (HBAR * self.omega_m)

    @property
    def n_th(self):
        if self.T_bath == 0.0:
            return 0.0
        x = HBAR * self.omega_m / (K_B * self.T_bath)
        if self.occupation is Occupation.BOSE:
            return 1.0 / math.expm1(x)
        return 1.0 / x


def derived_coupling(params):
    """Return ``(epsilon, chi, g)``.

    ``epsilon = sqrt(2 kappa P / (hbar omega_c))`` is the pump amplitude,
    ``chi = omega_c / L`` the radiation-pressure coupling and
    ``g = chi sqrt(hbar / (m omega_m))`` the single-photon coupling rate.
    """
    epsilon = math.sqrt(2.0 * params.kappa * params.P_pump / (HBAR * params.omega_c))
    chi = params.omega_c / params.L
    g = chi * math.sqrt(HBAR / (params.m * params.omega_m))
    return epsilon, chi, g


def cavity_amplitude(params):
    """Steady intracavity amplitude ``epsilon / sqrt(kappa^2 + delta^2)``.

    Bare driven-cavity value; the radiation-pressure detuning shift is
    neglected and the phase is chosen so the amplitude is real.
    """
    epsilon = derived_coupling(params)[0]
    return epsilon / math.hypot(params.kappa, params.delta)


def drift_matrix(params):
    """6x6 drift matrix of the linearised Langevin equations."""
    _, _, g = derived_coupling(params)
    coupling = math.sqrt(2.0) * cavity_amplitude(params) * g
    k, d = params.kappa, params.delta
    A = np.zeros((6, 6))
    A[0, 1] = params.omega_m
    A[1, 0] = -params.omega_m
    A[1, 1] = -params.gamma_m
    A[1, 2] = coupling
    A[3, 0] = coupling
    A[2:4, 2:4] = [[-k, d], [-d, -k]]
    A[4:6, 4:6] = [[-k, d], [-d, -k]]
    return A


class NoiseKind(str, enum.Enum):
    VACUUM = "vacuum"
    THERMAL = "thermal"
    TMS = "tms"


@dataclass(frozen=True)
class InputNoiseSpec:
    """State of the two extra light modes fed to the cavities."""

    kind: NoiseKind = NoiseKind.VACUUM
    n1: float = 0.0
    n2: float = 0.0
    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.n1 < 0 or self.n2 < 0:
            raise InvalidArgumentError("photon numbers must be >= 0")
        if self.r < 0:
            raise InvalidArgumentError("squeezing parameter r must be >= 0")
        if not np.isfinite(self.phi):
            raise InvalidArgumentError("phi must be finite")
        object.__setattr__(self, "phi", math.fmod(self.phi, TWO_PI) % TWO_PI)

    @classmethod
    def vacuum(cls):
        return cls(NoiseKind.VACUUM)

    @classmethod
    def thermal(cls, n1, n2=None):
        return cls(NoiseKind.THERMAL, n1=n1, n2=n1 if n2 is None else n2)

    @classmethod
    def two_mode_squeezed(cls, r, phi):
        return cls(NoiseKind.TMS, r=r, phi=phi)

    @classmethod
    def tms_from_photons(cls, n, phi):
        return cls.two_mode_squeezed(photon_to_squeezing(n), phi)

    @property
    def mean_photons(self):
        """Mean photon number in each input mode."""
        if self.kind is NoiseKind.TMS:
            n = math.sinh(self.r) ** 2
            return n, n
        return self.n1, self.n2

    def classical_counterpart(self):
        """Thermal input with the same mean photon number per mode."""
        return InputNoiseSpec.thermal(*self.mean_photons)


def photon_to_squeezing(n):
    """Squeezing ``r`` with ``cosh 2r = 2n + 1``."""
    if n < 0:
        raise InvalidArgumentError(f"mean photon number must be >= 0, got {n!r}")
    return 0.5 * math.acosh(2.0 * n + 1.0)


def input_covariance(spec, kappa):
    """Input block of the diffusion matrix (the input CM times ``2 kappa``)."""
    if spec.kind is NoiseKind.TMS:
        c2, s2 = math.cosh(2.0 * spec.r), math.sinh(2.0 * spec.r)
        cp, sp = math.cos(spec.phi), math.sin(spec.phi)
        rot = np.array([[cp, sp], [sp, -cp]])
        out = np.zeros((4, 4))
        out[:2, :2] = c2 * np.eye(2)
        out[2:, 2:] = c2 * np.eye(2)
        out[:2, 2:] = s2 * rot
        out[2:, :2] = s2 * rot
        return kappa * out
    n1, n2 = (0.0, 0.0) if spec.kind is NoiseKind.VACUUM else (spec.n1, spec.n2)
    return 2.0 * kappa * np.diag([n1 + 0.5, n1 + 0.5, n2 + 0.5, n2 + 0.5])


def diffusion_matrix(params, delta_csl, sigma_in):
    """Block-diagonal diffusion ``D = diag(sigma_m, sigma_in)``.

    ``sigma_m = diag(0, 2 gamma_m k_B T / (hbar omega_m) + Delta)``.
    """
    if not delta_csl >= 0:
        raise InvalidArgumentError(f"extra heating rate must be >= 0, got {delta_csl!r}")
    sigma_in = np.asarray(sigma_in, dtype=np.float64)
    if sigma_in.shape != (4, 4):
        raise InvalidArgumentError(f"input block must be 4x4, got {sigma_in.shape}")
    D = np.zeros((6, 6))
    D[1, 1] = params.thermal_diffusion + delta_csl
    D[2:, 2:] = 0.5 * (sigma_in + sigma_in.T)
    return D


def initial_state(params, delta_csl):
    """Preparation state before the extra light is switched on.

    Mechanics and cavity 1 sit in their joint steady state under vacuum
    input (heating ``delta_csl`` included); cavity 2 is in vacuum.
    """
    A = drift_matrix(params)
    D = diffusion_matrix(params, delta_csl, input_covariance(InputNoiseSpec.vacuum(), params.kappa))
    sigma = np.zeros((6, 6))
    sigma[:4, :4] = lyapunov_steady_state(A[:4, :4], D[:4, :4])
    sigma[4:, 4:] = 0.5 * np.eye(2)
    return sigma


class QuadratureSelector(str, enum.Enum):
    X_OUT1 = "x_out1"
    Y_OUT1 = "y_out1"
    X_OUT2 = "x_out2"
    Y_OUT2 = "y_out2"
    Q_PLUS = "q_plus"
    Q_MINUS = "q_minus"
    P_PLUS = "p_plus"
    P_MINUS = "p_minus"

    @property
    def is_epr(self):
        return self.value[0] in "qp"


LOCAL = {
    QuadratureSelector.X_OUT1: 2,
    QuadratureSelector.Y_OUT1: 3,
    QuadratureSelector.X_OUT2: 4,
    QuadratureSelector.Y_OUT2: 5,
}
# (index in cavity 1, index in cavity 2, sign); q/p_{+-} = (out1 +- out2) / sqrt2
EPR = {
    QuadratureSelector.Q_PLUS: (2, 4, 1.0),
    QuadratureSelector.Q_MINUS: (2, 4, -1.0),
    QuadratureSelector.P_PLUS: (3, 5, 1.0),
    QuadratureSelector.P_MINUS: (3, 5, -1.0),
}


def _check_full(sigma):
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape[-2:] != (6, 6):
        raise InvalidArgumentError(f"expected 6x6 covariance matrices, got shape {sigma.shape}")
    return sigma


def output_variance(sigma, sel, kappa):
    """Variance of a measured output quadrature.

    ``Var(x_out1) = 2 kappa sigma_33`` (and likewise for the other local
    quadratures), ``Var(q_+-) = kappa (sigma_33 + sigma_55 +- 2 sigma_35)``,
    ``Var(p_+-) = kappa (sigma_44 + sigma_66 +- 2 sigma_46)``. Accepts a
    stack of matrices with shape ``(..., 6, 6)``.
    """
    sigma = _check_full(sigma)
    sel = QuadratureSelector(sel)
    if sel in LOCAL:
        i = LOCAL[sel]
        return 2.0 * kappa * sigma[..., i, i]
    i, j, sign = EPR[sel]
    return kappa * (sigma[..., i, i] + sigma[..., j, j] + 2.0 * sign * sigma[..., i, j])


def output_two_mode_cm(sigma, kappa):
    """Covariance of ``(x_out1, y_out1, x_out2, y_out2)``: ``2 kappa`` times the optical block."""
    sigma = _check_full(sigma)
    return 2.0 * kappa * sigma[..., 2:, 2:]
