"""Truncated Fock-space reference for two-mode Gaussian fidelities.

Random Gaussian states are generated as ``U_O1 U_Z U_O2`` acting on a product
thermal state, where ``U_O`` are passive (photon-number conserving) unitaries
and ``U_Z`` is a product of single-mode unitaries. A quadratic Hamiltonian
``H = r^T h r / 2`` maps to the symplectic matrix ``exp(Omega h)``, so the
same random ``h`` matrices give both the covariance matrix and the density
matrix. Fidelity follows from ``F = (||X_a^dag X_b||_*)^2`` with
``rho = X X^dag``.
"""
import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .gaussian import symplectic_form

DEFAULT_CUTOFF = 40
PROB_FLOOR = 1e-12


class FockSpace:
    def __init__(self, cutoff=DEFAULT_CUTOFF):
        self.cutoff = int(cutoff)
        d = self.d = self.cutoff + 1
        a = sp.diags(np.sqrt(np.arange(1, d)), 1, format="csr")
        x = (a + a.T) / np.sqrt(2.0)
        p = (a - a.T) / (1j * np.sqrt(2.0))
        self.single = [x, p]
        eye = sp.identity(d, format="csr")
        ops = [sp.kron(x, eye), sp.kron(p, eye), sp.kron(eye, x), sp.kron(eye, p)]
        self.pairs = [[(ops[i] @ ops[j]).tocsr() for j in range(4)] for i in range(4)]
        n1, n2 = np.divmod(np.arange(d * d), d)
        total = n1 + n2
        self.sectors = [np.flatnonzero(total == n) for n in range(2 * d - 1)]

    def passive_unitary(self, h):
        """Apply-ready list of per-sector blocks for a number-conserving ``h``."""
        H = sum(0.5 * h[i, j] * self.pairs[i][j] for i in range(4) for j in range(4)).toarray()
        return [(idx, sla.expm(-1j * H[np.ix_(idx, idx)])) for idx in self.sectors]

    def local_unitary(self, h_mode):
        x, p = self.single
        ops = [x, p]
        H = sum(0.5 * h_mode[i, j] * (ops[i] @ ops[j]) for i in range(2) for j in range(2))
        return sla.expm(-1j * H.toarray())

    def thermal_columns(self, n1, n2):
        k = np.arange(self.d)
        p1 = n1**k / (n1 + 1.0) ** (k + 1)
        p2 = n2**k / (n2 + 1.0) ** (k + 1)
        P = np.outer(p1, p2).ravel()
        keep = np.flatnonzero(P > PROB_FLOOR)
        X = np.zeros((self.d * self.d, keep.size), dtype=complex)
        X[keep, np.arange(keep.size)] = np.sqrt(P[keep])
        return X


def _apply_passive(blocks, X):
    out = np.empty_like(X)
    for idx, U in blocks:
        out[idx] = U @ X[idx]
    return out


def _apply_local(U1, U2, X):
    d = U1.shape[0]
    T = X.reshape(d, d, -1)
    return np.einsum("ai,bj,ijc->abc", U1, U2, T, optimize=True).reshape(d * d, -1)


def passive_generator(rng, scale):
    B = rng.normal(scale=scale, size=(4, 4))
    h = B + B.T
    omega = symplectic_form(2)
    return 0.5 * (h + omega.T @ h @ omega)


def random_state(rng, space, max_photons=0.3, scale=0.2):
    """Return ``(V, X)``: a random two-mode CM and its Fock factor ``rho = X X^dag``."""
    omega = symplectic_form(2)
    hp1 = passive_generator(rng, scale)
    hp2 = passive_generator(rng, scale)
    locals_ = []
    for _ in range(2):
        B = rng.normal(scale=scale, size=(2, 2))
        locals_.append(B + B.T)
    hz = sla.block_diag(*locals_)
    n = rng.uniform(0.0, max_photons, 2)

    S = sla.expm(omega @ hp1) @ sla.expm(omega @ hz) @ sla.expm(omega @ hp2)
    V = S @ np.diag([n[0] + 0.5] * 2 + [n[1] + 0.5] * 2) @ S.T

    X = space.thermal_columns(*n)
    X = _apply_passive(space.passive_unitary(hp2), X)
    X = _apply_local(space.local_unitary(locals_[0]), space.local_unitary(locals_[1]), X)
    X = _apply_passive(space.passive_unitary(hp1), X)
    return 0.5 * (V + V.T), X


def fock_fidelity(Xa, Xb):
    """Squared Uhlmann fidelity of ``Xa Xa^dag`` and ``Xb Xb^dag``."""
    s = np.linalg.svd(Xa.conj().T @ Xb, compute_uv=False)
    return float(s.sum() ** 2)
