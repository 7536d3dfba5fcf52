"""Linear-algebra core for Gaussian dynamics.

Covariance matrices use the convention ``sigma_ij = <{dr_i, dr_j}>/2`` with
``[Q, P] = i``, so the single-mode vacuum is ``I/2``. Matrices are plain
``numpy`` arrays; mode ordering is ``(Q, P, X1, Y1, X2, Y2)`` for the full
system.
"""
import numpy as np

from . import kernels
from .errors import InvalidArgumentError, NumericalError, StabilityError

PHYSICALITY_TOL = 1e-9
HURWITZ_MARGIN = -1e-12
SYMMETRY_RTOL = 1e-12


def symplectic_form(n_modes):
    """Block-diagonal symplectic form with one ``[[0, 1], [-1, 0]]`` per mode."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidArgumentError(f"n_modes must be a positive integer, got {n_modes!r}")
    return np.kron(np.eye(int(n_modes)), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _as_square(M, name):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    return M


def matrix_exponential(M, t=1.0):
    """Return ``exp(M t)`` by degree-13 Pade scaling and squaring."""
    M = _as_square(M, "M")
    if not np.isfinite(t):
        raise InvalidArgumentError("t must be finite")
    return kernels.expm(M * float(t))


def max_real_eigenvalue(A):
    return float(np.max(np.linalg.eigvals(A).real))


def require_hurwitz(A):
    lam = max_real_eigenvalue(A)
    if not lam < HURWITZ_MARGIN:
        raise StabilityError(lam)
    return lam


def lyapunov_residual(A, sigma, D):
    return float(np.linalg.norm(A @ sigma + sigma @ A.T + D))


def lyapunov_steady_state(A, D):
    """Solve ``A sigma + sigma A^T + D = 0`` for a Hurwitz drift ``A``.

    The equation is vectorised column-major, ``(I kron A + A kron I) vec(sigma) =
    -vec(D)``, and solved densely; one step of iterative refinement brings
    the residual down to rounding level even for stiff drifts.

    Raises
    ------
    StabilityError
        If ``A`` has an eigenvalue with real part ``>= -1e-12``.
    NumericalError
        If the Kronecker system is singular to working precision.
    """
    A = _as_square(A, "A")
    D = _as_square(D, "D")
    if A.shape != D.shape:
        raise InvalidArgumentError(f"A and D shapes differ: {A.shape} vs {D.shape}")
    require_hurwitz(A)
    n = A.shape[0]
    ident = np.eye(n)
    K = np.kron(ident, A) + np.kron(A, ident)
    rhs = -D.reshape(-1, order="F")
    try:
        x = np.linalg.solve(K, rhs)
        x = x + np.linalg.solve(K, rhs - K @ x)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular Kronecker system: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise NumericalError("Kronecker solve produced non-finite entries")
    sigma = x.reshape((n, n), order="F")
    return 0.5 * (sigma + sigma.T)


def propagate_covariance(A, D, sigma0, t_grid):
    """Evolve ``sigma' = A sigma + sigma A^T + D`` to each time in ``t_grid``.

    Each grid point is computed independently from ``sigma0`` with the exact
    map ``sigma(t) = Phi sigma0 Phi^T + Q(t)``, so no step error accumulates
    along the grid.

    Returns
    -------
    ndarray of shape ``(len(t_grid), n, n)``
    """
    A = _as_square(A, "A")
    D = _as_square(D, "D")
    sigma0 = _as_square(sigma0, "sigma0")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=np.float64))
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise InvalidArgumentError("t_grid must be a non-empty 1-D sequence")
    if t_grid[0] < 0.0:
        raise InvalidArgumentError("t_grid must start at t >= 0")
    if np.any(np.diff(t_grid) <= 0.0):
        raise InvalidArgumentError("t_grid must be strictly increasing")
    out = np.empty((t_grid.size,) + sigma0.shape)
    for k, t in enumerate(t_grid):
        phi, Q = kernels.transition_and_noise(A, D, float(t))
        s = phi @ sigma0 @ phi.T + Q
        out[k] = 0.5 * (s + s.T)
    return out


def is_symmetric(sigma, rtol=SYMMETRY_RTOL):
    sigma = np.asarray(sigma)
    scale = max(np.abs(sigma).max(), 1.0)
    return bool(np.abs(sigma - sigma.T).max() <= rtol * scale)


def check_physicality(sigma, tol=PHYSICALITY_TOL):
    """Test the uncertainty principle ``sigma + i Omega / 2 >= 0``.

    Returns
    -------
    (bool, float)
        Whether the smallest eigenvalue is ``>= -tol``, and that eigenvalue.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise InvalidArgumentError(f"covariance must be square, got {sigma.shape}")
    if sigma.shape[0] % 2:
        raise InvalidArgumentError(f"covariance dimension must be even, got {sigma.shape[0]}")
    omega = symplectic_form(sigma.shape[0] // 2)
    worst = float(np.linalg.eigvalsh(sigma + 0.5j * omega).min())
    return worst >= -tol, worst
