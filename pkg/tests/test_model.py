import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from optoqht.constants import C_LIGHT, HBAR, K_B, TWO_PI
from optoqht.errors import InvalidArgumentError
from optoqht.gaussian import check_physicality, max_real_eigenvalue, propagate_covariance
from optoqht.model import (
    MECHANICAL_QUALITY,
    InputNoiseSpec,
    NoiseKind,
    Occupation,
    QuadratureSelector,
    SystemParams,
    cavity_amplitude,
    diffusion_matrix,
    drift_matrix,
    initial_state,
    input_covariance,
    output_two_mode_cm,
    output_variance,
    photon_to_squeezing,
)
from optoqht.gaussian import lyapunov_steady_state

P = SystemParams()


def test_reference_values():
    assert P.omega_m == pytest.approx(TWO_PI * 2.75e5)
    assert P.gamma_m == pytest.approx(P.omega_m / MECHANICAL_QUALITY)
    assert P.delta == 4 * P.kappa
    assert P.m == 150e-12


def test_no_pump_gives_zero_drive():
    p = P.with_(P_pump=0.0)
    assert p.epsilon == 0.0
    assert p.alpha == 0.0


def test_chi_from_reference_cavity():
    omega_c = TWO_PI * 9.4e5 * C_LIGHT
    assert P.chi == pytest.approx(omega_c / 25e-3, rel=1e-15)


def test_g_scales_with_inverse_root_mass():
    assert P.with_(m=2 * P.m).g == pytest.approx(P.g / math.sqrt(2), rel=1e-14)


def test_resonant_amplitude():
    p = P.with_(delta=1e-300)
    assert cavity_amplitude(p) == pytest.approx(p.epsilon / p.kappa, rel=1e-14)


def test_intracavity_photons_match_driven_cavity_steady_state():
    # steady state of da/dt = -(kappa + i delta) a + epsilon
    a = P.epsilon / complex(P.kappa, P.delta)
    assert P.alpha**2 == pytest.approx(abs(a) ** 2, rel=1e-13)


def test_drift_decoupled_blocks():
    p = P.with_(P_pump=0.0)
    A = drift_matrix(p)
    assert np.array_equal(A[:2, :2], [[0.0, p.omega_m], [-p.omega_m, -p.gamma_m]])
    assert np.all(A[:2, 2:] == 0) and np.all(A[2:, :2] == 0)


def test_drift_entries_and_hurwitz():
    A = drift_matrix(P)
    assert A[0, 1] == P.omega_m
    assert A[1, 1] == -P.gamma_m
    coupling = math.sqrt(2) * P.alpha * P.g
    assert A[1, 2] == A[3, 0] == pytest.approx(coupling)
    assert max_real_eigenvalue(A) < 0


def test_input_covariance_limits():
    k = P.kappa
    assert np.allclose(input_covariance(InputNoiseSpec.thermal(0.0), k), k * np.eye(4))
    for phi in (0.0, 1.0, math.pi):
        assert np.allclose(input_covariance(InputNoiseSpec.two_mode_squeezed(0.0, phi), k), k * np.eye(4))
    r = 0.7
    cov = input_covariance(InputNoiseSpec.two_mode_squeezed(r, 0.0), k)
    assert np.allclose(cov[:2, :2], k * math.cosh(2 * r) * np.eye(2))
    assert np.allclose(cov[:2, 2:], k * math.sinh(2 * r) * np.diag([1.0, -1.0]))
    assert np.allclose(cov[2:, :2], cov[:2, 2:])


def test_photon_to_squeezing():
    assert photon_to_squeezing(0.0) == 0.0
    assert photon_to_squeezing(100.0) == pytest.approx(2.9982229502979697388, rel=1e-15)
    with pytest.raises(InvalidArgumentError):
        photon_to_squeezing(-1.0)


@given(st.floats(0.0, 1e4))
def test_squeezing_round_trip(n):
    r = photon_to_squeezing(n)
    assert (math.cosh(2 * r) - 1) / 2 == pytest.approx(n, rel=1e-12, abs=1e-12)
    assert InputNoiseSpec.tms_from_photons(n, 0.0).mean_photons[0] == pytest.approx(n, rel=1e-12, abs=1e-12)


def test_input_spec_validation():
    with pytest.raises(InvalidArgumentError):
        InputNoiseSpec.thermal(-1.0)
    with pytest.raises(InvalidArgumentError):
        InputNoiseSpec.two_mode_squeezed(-0.1, 0.0)
    with pytest.raises(InvalidArgumentError):
        InputNoiseSpec.two_mode_squeezed(0.1, math.inf)
    assert InputNoiseSpec.two_mode_squeezed(1.0, 3 * math.pi).phi == pytest.approx(math.pi)
    tms = InputNoiseSpec.tms_from_photons(10.0, math.pi)
    cc = tms.classical_counterpart()
    assert cc.kind is NoiseKind.THERMAL and cc.n1 == pytest.approx(10.0)


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        SystemParams(kappa=0.0)
    with pytest.raises(InvalidArgumentError):
        SystemParams(T_bath=-1.0)
    assert SystemParams(T_bath=0.0).n_th == 0.0
    x = HBAR * P.omega_m / (K_B * P.T_bath)
    assert P.with_(occupation=Occupation.BOSE).n_th == pytest.approx(1 / math.expm1(x))


def test_diffusion_matrix():
    zero = diffusion_matrix(P.with_(T_bath=0.0), 0.0, input_covariance(InputNoiseSpec.vacuum(), P.kappa))
    assert np.all(zero[:2, :2] == 0)
    D = diffusion_matrix(P, 1e6, input_covariance(InputNoiseSpec.vacuum(), P.kappa))
    assert D[1, 1] == pytest.approx(2 * P.gamma_m * K_B * P.T_bath / (HBAR * P.omega_m) + 1e6, rel=1e-14)
    with pytest.raises(InvalidArgumentError):
        diffusion_matrix(P, -1.0, np.eye(4))
    with pytest.raises(InvalidArgumentError):
        diffusion_matrix(P, 0.0, np.eye(3))


def test_weak_heating_below_thermal_diffusion():
    # holds when gamma_m carries the extra 2 pi (mechanical Q applied to the
    # cyclic frequency); see the decisions ledger for the default reading
    literal = P.with_(gamma_m=TWO_PI * P.omega_m / MECHANICAL_QUALITY)
    assert 1e4 < literal.thermal_diffusion
    assert P.thermal_diffusion < 1e4


def test_initial_state():
    s = initial_state(P, 1e6)
    assert np.array_equal(s[4:, 4:], 0.5 * np.eye(2))
    assert check_physicality(s)[0]
    assert not np.allclose(s, initial_state(P, 0.0))


def test_initial_state_decoupled_thermal():
    p = P.with_(P_pump=0.0)
    s = initial_state(p, 0.0)
    # Brownian equilibrium: both mechanical variances equal D / (2 gamma)
    v = p.thermal_diffusion / (2 * p.gamma_m)
    assert np.allclose(s[:2, :2], np.diag([v, v]), rtol=1e-12)
    assert v == pytest.approx(K_B * p.T_bath / (HBAR * p.omega_m), rel=1e-14)


def test_output_variance_identities(rng):
    B = rng.normal(size=(6, 6))
    s = B @ B.T
    k = P.kappa
    qp = output_variance(s, QuadratureSelector.Q_PLUS, k)
    qm = output_variance(s, QuadratureSelector.Q_MINUS, k)
    x1 = output_variance(s, QuadratureSelector.X_OUT1, k)
    x2 = output_variance(s, QuadratureSelector.X_OUT2, k)
    assert qp + qm == pytest.approx(x1 + x2, rel=1e-13)
    assert qp + qm == pytest.approx(2 * k * (s[2, 2] + s[4, 4]), rel=1e-13)
    s[2, 4] = s[4, 2] = 0.0
    assert output_variance(s, "q_plus", k) == pytest.approx(output_variance(s, "q_minus", k), rel=1e-14)
    cm = output_two_mode_cm(s, k)
    local = [output_variance(s, sel, k) for sel in ("x_out1", "y_out1", "x_out2", "y_out2")]
    assert np.allclose(np.diag(cm), local, rtol=1e-14)
    with pytest.raises(InvalidArgumentError):
        output_variance(np.eye(4), "q_plus", k)
    with pytest.raises(ValueError):
        output_variance(s, "z_out9", k)


def test_output_variance_batched():
    stack = np.stack([np.eye(6) * (i + 1) for i in range(3)])
    v = output_variance(stack, QuadratureSelector.P_PLUS, 2.0)
    assert np.allclose(v, [4.0, 8.0, 12.0])


def _evolve(spec, delta, t):
    A = drift_matrix(P)
    D = diffusion_matrix(P, delta, input_covariance(spec, P.kappa))
    return propagate_covariance(A, D, initial_state(P, delta), t)


T_GRID = np.logspace(-9, math.log10(20 / P.gamma_m), 60)


def test_second_cavity_blind_to_heating_for_thermal_input():
    spec = InputNoiseSpec.thermal(100.0)
    a = _evolve(spec, 0.0, T_GRID)
    b = _evolve(spec, 1e6, T_GRID)
    assert np.allclose(a[:, 4, 4], b[:, 4, 4], rtol=1e-14, atol=0)


def test_output_cm_physical_for_vacuum_input():
    sigma = lyapunov_steady_state(
        drift_matrix(P), diffusion_matrix(P, 0.0, input_covariance(InputNoiseSpec.vacuum(), P.kappa))
    )
    assert check_physicality(output_two_mode_cm(sigma, P.kappa))[0]


def test_hypotheses_differ_at_start():
    spec = InputNoiseSpec.tms_from_photons(100.0, math.pi)
    a = _evolve(spec, 0.0, [0.0])[0]
    b = _evolve(spec, 1e6, [0.0])[0]
    assert not np.allclose(a, b)


@pytest.mark.parametrize("sel", ["x_out1", "y_out1", "q_plus", "q_minus", "p_plus", "p_minus"])
def test_heating_raises_coupled_variances(sel):
    spec = InputNoiseSpec.tms_from_photons(100.0, math.pi)
    v0 = output_variance(_evolve(spec, 0.0, T_GRID), sel, P.kappa)
    v1 = output_variance(_evolve(spec, 1e6, T_GRID), sel, P.kappa)
    assert np.all(v1 > v0)


@pytest.mark.parametrize("sel", ["x_out2", "y_out2"])
def test_uncoupled_cavity_variances_unchanged(sel):
    spec = InputNoiseSpec.tms_from_photons(100.0, math.pi)
    v0 = output_variance(_evolve(spec, 0.0, T_GRID), sel, P.kappa)
    v1 = output_variance(_evolve(spec, 1e6, T_GRID), sel, P.kappa)
    assert np.allclose(v0, v1, rtol=1e-14, atol=0)
