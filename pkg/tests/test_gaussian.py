import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from optoqht.errors import InvalidArgumentError, StabilityError
from optoqht.gaussian import (
    check_physicality,
    is_symmetric,
    lyapunov_residual,
    lyapunov_steady_state,
    matrix_exponential,
    max_real_eigenvalue,
    propagate_covariance,
    require_hurwitz,
    symplectic_form,
)
from optoqht.model import SystemParams, diffusion_matrix, drift_matrix, input_covariance, InputNoiseSpec

from conftest import random_hurwitz, random_psd


def test_symplectic_form_blocks():
    assert np.array_equal(symplectic_form(1), [[0, 1], [-1, 0]])
    om2 = symplectic_form(2)
    assert om2.shape == (4, 4)
    assert np.array_equal(om2[2:, 2:], [[0, 1], [-1, 0]])
    assert np.array_equal(om2[:2, 2:], np.zeros((2, 2)))
    assert np.array_equal(symplectic_form(3) @ symplectic_form(3), -np.eye(6))


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_symplectic_form_rejects(bad):
    with pytest.raises(InvalidArgumentError):
        symplectic_form(bad)


def test_expm_trivial_cases():
    assert np.array_equal(matrix_exponential(np.zeros((3, 3)), 7.0), np.eye(3))
    out = matrix_exponential(np.diag([-1.0, -2.0]))
    assert np.allclose(out, np.diag([np.exp(-1), np.exp(-2)]), rtol=1e-15, atol=0)


def test_expm_semigroup(rng):
    for _ in range(10):
        M = random_hurwitz(rng, 6)
        t1, t2 = rng.uniform(0.1, 2.0, 2)
        lhs = matrix_exponential(M, t1 + t2)
        rhs = matrix_exponential(M, t1) @ matrix_exponential(M, t2)
        assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-12)


def test_expm_matches_scipy(rng):
    for scale in (1e-3, 1.0, 30.0):
        M = rng.normal(size=(6, 6)) * scale
        ref = sla.expm(M)
        assert np.linalg.norm(matrix_exponential(M) - ref) <= 1e-12 * np.linalg.norm(ref)


def test_expm_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        matrix_exponential(np.ones((2, 3)))
    with pytest.raises(InvalidArgumentError):
        matrix_exponential(np.array([[np.nan]]))


def test_lyapunov_scalar_case():
    lam, d = 3.0, 0.7
    sigma = lyapunov_steady_state(-lam * np.eye(2), d * np.eye(2))
    assert np.allclose(sigma, d / (2 * lam) * np.eye(2), rtol=1e-14)


def test_lyapunov_oscillator_against_kronecker():
    w, g, d = 2.0, 0.3, 1.1
    A = np.array([[0.0, w], [-w, -g]])
    D = np.diag([0.0, d])
    # independent oracle: dense solve of the column-major vectorised system
    K = np.kron(np.eye(2), A) + np.kron(A, np.eye(2))
    ref = np.linalg.solve(K, -D.reshape(-1, order="F")).reshape(2, 2, order="F")
    sigma = lyapunov_steady_state(A, D)
    assert np.allclose(sigma, ref, rtol=1e-12, atol=1e-15)
    assert np.allclose(sigma, d / (2 * g) * np.eye(2), rtol=1e-12, atol=1e-14)


def _mp_lyapunov(A, D, dps=40):
    import mpmath as mp

    n = A.shape[0]
    mp.mp.dps = dps
    K = mp.zeros(n * n, n * n)
    for r in range(n):
        for c in range(n):
            row = c * n + r
            for k in range(n):
                K[row, c * n + k] += A[r, k]
                K[row, k * n + r] += A[c, k]
    x = mp.lu_solve(K, mp.matrix([-D[r, c] for c in range(n) for r in range(n)]))
    return np.array([[float(x[c * n + r]) for c in range(n)] for r in range(n)])


def test_lyapunov_reference_against_independent_solvers():
    params = SystemParams()
    A = drift_matrix(params)[:4, :4]
    D = diffusion_matrix(params, 0.0, input_covariance(InputNoiseSpec.vacuum(), params.kappa))[:4, :4]
    sigma = lyapunov_steady_state(A, D)
    ref = _mp_lyapunov(A, D)
    assert np.linalg.norm(sigma - ref) <= 1e-12 * np.linalg.norm(ref)
    # Bartels-Stewart (Schur based) as a second, algorithmically distinct check
    bs = sla.solve_continuous_lyapunov(A, -D)
    assert np.linalg.norm(sigma - bs) <= 1e-8 * np.linalg.norm(ref)
    assert check_physicality(sigma)[0]


def test_lyapunov_residual_small_on_reference():
    params = SystemParams()
    A = drift_matrix(params)
    D = diffusion_matrix(params, 1e6, input_covariance(InputNoiseSpec.tms_from_photons(100, np.pi), params.kappa))
    sigma = lyapunov_steady_state(A, D)
    assert lyapunov_residual(A, sigma, D) <= 1e-10 * np.linalg.norm(D)


def test_lyapunov_requires_hurwitz():
    with pytest.raises(StabilityError) as info:
        lyapunov_steady_state(np.diag([0.1, -1.0]), np.eye(2))
    assert info.value.max_real_part == pytest.approx(0.1)
    with pytest.raises(StabilityError):
        require_hurwitz(np.zeros((2, 2)))


def test_propagate_identity_at_zero(rng):
    A = random_hurwitz(rng, 4)
    s0 = random_psd(rng, 4)
    out = propagate_covariance(A, random_psd(rng, 4), s0, [0.0])
    assert np.array_equal(out[0], 0.5 * (s0 + s0.T))


def test_propagate_pure_diffusion():
    s0 = np.diag([1.0, 2.0])
    out = propagate_covariance(np.zeros((2, 2)), 0.3 * np.eye(2), s0, [0.5, 2.0])
    assert np.allclose(out[0], s0 + 0.15 * np.eye(2), rtol=1e-14)
    assert np.allclose(out[1], s0 + 0.6 * np.eye(2), rtol=1e-14)


def test_propagate_long_time_limit(rng):
    A = random_hurwitz(rng, 6, shift=0.3)
    D = random_psd(rng, 6)
    t = 10.0 / abs(max_real_eigenvalue(A))
    out = propagate_covariance(A, D, np.eye(6), [t])[0]
    ss = lyapunov_steady_state(A, D)
    # the transient decays like exp(-2 * 10); allow 1e-6 relative
    assert np.linalg.norm(out - ss) <= 1e-6 * np.linalg.norm(ss)


def _rk4(A, D, s, t, steps):
    h = t / steps
    f = lambda x: A @ x + x @ A.T + D  # noqa: E731
    for _ in range(steps):
        k1 = f(s)
        k2 = f(s + 0.5 * h * k1)
        k3 = f(s + 0.5 * h * k2)
        k4 = f(s + h * k3)
        s = s + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return s


def test_propagate_against_rk4(rng):
    A = random_hurwitz(rng, 4)
    D = random_psd(rng, 4)
    s0 = random_psd(rng, 4)
    out = propagate_covariance(A, D, s0, [0.3, 1.7])
    for t, s in zip((0.3, 1.7), out):
        ref = _rk4(A, D, s0, t, 4000)
        assert np.allclose(s, ref, rtol=1e-10, atol=1e-12)


def test_propagate_stiff_reference_horizon():
    params = SystemParams()
    A = drift_matrix(params)
    D = diffusion_matrix(params, 1e6, input_covariance(InputNoiseSpec.tms_from_photons(100, np.pi), params.kappa))
    ss = lyapunov_steady_state(A, D)
    out = propagate_covariance(A, D, 0.5 * np.eye(6), [20.0 / params.gamma_m])[0]
    assert np.all(np.isfinite(out))
    # about 27 exact doublings at this horizon; measured error is ~6e-8
    assert np.linalg.norm(out - ss) <= 1e-6 * np.linalg.norm(ss)


@pytest.mark.parametrize("grid", [[1.0, 1.0], [2.0, 1.0], [-1.0, 1.0], []])
def test_propagate_rejects_bad_grid(grid):
    with pytest.raises(InvalidArgumentError):
        propagate_covariance(-np.eye(2), np.eye(2), np.eye(2), grid)


@given(seed=st.integers(0, 2**32 - 1), frac=st.floats(0.05, 0.95))
def test_propagation_composition_property(seed, frac):
    rng = np.random.default_rng(seed)
    A = random_hurwitz(rng, 4)
    D = random_psd(rng, 4)
    s0 = random_psd(rng, 4)
    t = float(rng.uniform(0.1, 5.0))
    full = propagate_covariance(A, D, s0, [t])[0]
    mid = propagate_covariance(A, D, s0, [frac * t])[0]
    two = propagate_covariance(A, D, mid, [(1 - frac) * t])[0]
    assert np.linalg.norm(two - full) <= 1e-9 * max(np.linalg.norm(full), 1.0)


@given(seed=st.integers(0, 2**32 - 1))
def test_lyapunov_residual_property(seed):
    rng = np.random.default_rng(seed)
    A = random_hurwitz(rng, 6, shift=0.2)
    D = random_psd(rng, 6)
    sigma = lyapunov_steady_state(A, D)
    assert is_symmetric(sigma)
    assert lyapunov_residual(A, sigma, D) <= 1e-10 * np.linalg.norm(D)


@given(seed=st.integers(0, 2**32 - 1))
def test_steady_state_attractivity(seed):
    # dissipative drift -P + S (P > 0, S skew) contracts the Frobenius norm
    rng = np.random.default_rng(seed)
    P = random_psd(rng, 4) + 0.1 * np.eye(4)
    S = rng.normal(size=(4, 4))
    A = -P + (S - S.T)
    D = random_psd(rng, 4)
    ss = lyapunov_steady_state(A, D)
    lam = abs(max_real_eigenvalue(A))
    t = np.linspace(5.0 / lam, 30.0 / lam, 20)
    traj = propagate_covariance(A, D, ss + 5.0 * np.eye(4), t)
    dist = [np.linalg.norm(s - ss) for s in traj]
    assert all(b <= a * (1 + 1e-9) + 1e-12 for a, b in zip(dist, dist[1:]))


def test_physicality_examples():
    ok, worst = check_physicality(0.5 * np.eye(4))
    assert ok and abs(worst) < 1e-15
    assert not check_physicality(0.25 * np.eye(2))[0]
    r = 1.0
    c, s = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    tms = np.block([[c * np.eye(2), s * np.diag([1, -1])], [s * np.diag([1, -1]), c * np.eye(2)]])
    ok, worst = check_physicality(tms)
    assert ok and abs(worst) < 1e-12
    with pytest.raises(InvalidArgumentError):
        check_physicality(np.eye(3))


@given(seed=st.integers(0, 2**32 - 1))
def test_physicality_preserved_under_dynamics(seed):
    # damping into vacuum: A = -g I, D = g I keeps the vacuum floor
    rng = np.random.default_rng(seed)
    g = float(rng.uniform(0.1, 3.0))
    s0 = 0.5 * np.eye(4) + random_psd(rng, 4)
    rot = np.kron(np.eye(2), [[0.0, 1.0], [-1.0, 0.0]]) * float(rng.uniform(0, 5))
    A = -0.5 * g * np.eye(4) + rot
    D = g * 0.5 * np.eye(4)
    for s in propagate_covariance(A, D, s0, np.linspace(0.0, 5.0, 11)):
        assert check_physicality(s)[0]
