"""CSL-induced heating of a homogeneous spherical oscillator."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import kernels
from .constants import AMU, HBAR, TWO_PI
from .errors import InvalidArgumentError, NumericalError

ADLER_GAMMA = 1e-28  # m^3 Hz
R_C_DEFAULT = 100e-9  # m

QUAD_EPSREL = 1e-10
DEFAULT_PANELS = 32
TRUNCATION = 1e-16
FORM_FACTOR_SERIES_MAX = 0.5
FORM_FACTOR_TERMS = 8


@dataclass(frozen=True)
class CslParams:
    gamma_csl: float = ADLER_GAMMA
    r_c: float = R_C_DEFAULT
    R_sphere: float = 1e-6
    m: float = 150e-12

    def __post_init__(self):
        if not (np.isfinite(self.gamma_csl) and self.gamma_csl >= 0):
            raise InvalidArgumentError(f"gamma_csl must be finite and >= 0, got {self.gamma_csl!r}")
        for name in ("r_c", "R_sphere", "m"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be finite and > 0, got {value!r}")


def sphere_form_factor(k, R, m):
    """Fourier transform of a homogeneous sphere of radius ``R`` and mass ``m``.

    ``3 m (sin kR - kR cos kR) / (kR)^3``, with a power series below
    ``kR = 0.5`` where the closed form loses digits to cancellation.
    """
    if R <= 0:
        raise InvalidArgumentError(f"R must be > 0, got {R!r}")
    k = np.asarray(k, dtype=np.float64)
    if np.any(k < 0):
        raise InvalidArgumentError("k must be >= 0")
    x = k * R
    small = x < FORM_FACTOR_SERIES_MAX
    xs = np.where(small, 1.0, x)
    exact = 3.0 * (np.sin(xs) - xs * np.cos(xs)) / xs**3
    # 3 sum_{j>=1} (-1)^(j+1) 2j x^(2j-2) / (2j+1)!, Horner in x^2
    x2 = x * x
    series = np.zeros_like(x)
    for j in range(FORM_FACTOR_TERMS, 0, -1):
        series = series * x2 + (-1) ** (j + 1) * 6.0 * j / math.factorial(2 * j + 1)
    out = m * np.where(small, series, exact)
    return out if out.ndim else float(out)


def _prefactor(csl, omega_m):
    return HBAR * csl.gamma_csl / (3.0 * csl.m * omega_m * AMU**2)


def csl_delta(csl, omega_m, panels=DEFAULT_PANELS, two_pi=False):
    """Heating rate of the dimensionless momentum quadrature.

    Uses the Fourier form of the Gaussian-smeared gradient overlap::

        Delta = hbar gamma / (3 m omega_m m0^2) * (1 / 2 pi^2)
                * int_0^inf k^4 exp(-k^2 r_C^2) |rho(k)|^2 dk

    The integral is taken in ``u = k r_C`` over ``panels`` equal sub-intervals
    with adaptive Gauss-Kronrod quadrature each. ``two_pi`` multiplies the
    result by ``2 pi`` for unit-convention sensitivity studies.
    """
    if not omega_m > 0:
        raise InvalidArgumentError("omega_m must be > 0")
    if int(panels) < 1:
        raise InvalidArgumentError("panels must be >= 1")
    rc, R, m = csl.r_c, csl.R_sphere, csl.m

    def f(u):
        ff = sphere_form_factor(u / rc, R, 1.0)
        return u**4 * np.exp(-(u * u)) * ff * ff

    u_max = 50.0 * rc / min(rc, R)
    probe = np.linspace(0.0, u_max, 200001)
    values = f(probe)
    peak = values.max()
    if not peak > 0:
        raise NumericalError("CSL integrand vanishes on the whole domain")
    above = np.nonzero(values >= TRUNCATION * peak)[0]
    u_hi = probe[min(above[-1] + 1, probe.size - 1)]

    edges = np.linspace(0.0, u_hi, int(panels) + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, err, info = integrate.quad(
            f, lo, hi, epsabs=0.0, epsrel=QUAD_EPSREL, limit=500, full_output=True
        )[:3]
        if info.get("last", 0) >= 500 or not np.isfinite(value):
            raise NumericalError(
                f"quadrature did not converge on [{lo:.4g}, {hi:.4g}]: value={value}, err={err}"
            )
        total += value
    integral = m * m * total / rc**5 / (2.0 * math.pi**2)
    delta = _prefactor(csl, omega_m) * integral
    return delta * TWO_PI if two_pi else delta


def _uniform_ball(rng, n, R):
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * (R * np.cbrt(rng.random(n)))[:, None]


def csl_delta_monte_carlo(csl, omega_m, samples=10**7, seed=0, block=1 << 16, workers=1):
    """Real-space Monte Carlo estimate of the heating rate.

    Integrating the gradient overlap by parts gives
    ``m^2 E[-lap K(r - r')]`` with ``r, r'`` uniform in the sphere and ``K`` the
    normalised Gaussian kernel of width ``sqrt(2) r_C``. Samples are drawn in
    fixed blocks, each from its own Philox stream keyed by ``(seed, block)``,
    so the estimate does not depend on ``workers``.

    Returns
    -------
    (float, float)
        Estimate and its standard error.
    """
    samples = int(samples)
    if samples < 2:
        raise InvalidArgumentError("samples must be >= 2")
    sizes = [block] * (samples // block)
    if samples % block:
        sizes.append(samples % block)

    def run(index):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))
        r1 = _uniform_ball(rng, sizes[index], csl.R_sphere)
        r2 = _uniform_ball(rng, sizes[index], csl.R_sphere)
        return kernels.neg_laplacian_kernel_sums(r1, r2, csl.r_c)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(run, range(len(sizes))))
    else:
        sums = [run(i) for i in range(len(sizes))]
    s = sum(x for x, _ in sums)
    s2 = sum(y for _, y in sums)
    mean = s / samples
    var = max(s2 / samples - mean * mean, 0.0)
    scale = _prefactor(csl, omega_m) * csl.m**2
    return scale * mean, scale * math.sqrt(var / samples)


def csl_occupation(n_th, delta, gamma_m):
    """Phonon occupation including CSL heating: ``n_th + Delta / (2 gamma_m)``."""
    if gamma_m == 0:
        raise InvalidArgumentError("gamma_m must be > 0")
    if n_th < 0 or delta < 0 or gamma_m < 0:
        raise InvalidArgumentError("n_th, delta and gamma_m must be non-negative")
    return n_th + delta / (2.0 * gamma_m)
