"""Reference ground states from two independent solvers.

* :func:`jacobi_eigen` diagonalizes the truncated Hamiltonian matrix with
  cyclic Jacobi rotations.
* :func:`fd_ground_state` discretizes the differential operator on a uniform
  grid (3-point Laplacian, Dirichlet walls) and finds its lowest eigenpair by
  inverse iteration.  It never touches the spectral basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vqs import kernels
from vqs.basis import BoxSystem
from vqs.errors import ContractError, ConvergenceError
from vqs.hamiltonian import HamiltonianMatrix


@dataclass(frozen=True, eq=False)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    iterations: int

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_vector(self) -> np.ndarray:
        return self.eigenvectors[:, 0]


def _off_norm(A):
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return np.linalg.norm(off)


def jacobi_eigen(H, tol=1e-12, max_sweeps=100) -> EigenResult:
    """Full spectrum of a symmetric matrix by cyclic Jacobi sweeps.

    Iteration stops once the off-diagonal Frobenius norm falls below
    ``tol * ||H||_F``.  ``iterations`` counts sweeps.
    """
    A = np.array(H.H if isinstance(H, HamiltonianMatrix) else H, dtype=np.float64, order="C")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {A.shape}")
    scale = np.linalg.norm(A)
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise ContractError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    sweeps = 0
    while _off_norm(A) > tol * scale:
        if sweeps == max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", _off_norm(A))
        kernels.jacobi_sweep(A, V)
        sweeps += 1
    values = np.diag(A).copy()
    order = np.argsort(values, kind="stable")
    return EigenResult(values[order], V[:, order], sweeps)


def fd_operator(system: BoxSystem, M: int):
    """Interior grid and tridiagonal bands of the discretized Hamiltonian."""
    h = system.a / (M + 1)
    x = h * np.arange(1, M + 1)
    k = system.kinetic_prefactor / h**2
    diag = 2.0 * k + system.potential(x)
    off = np.full(M - 1, -k)
    return x, diag, off


def _tridiag_rayleigh(v, diag, off):
    # v^T A v written as a sum of squares of differences to avoid cancellation
    k = -off[0] if off.size else 0.0
    padded = np.concatenate(([0.0], v, [0.0]))
    kinetic = k * np.sum(np.diff(padded) ** 2)
    potential = np.sum((diag - 2.0 * k) * v * v)
    return (kinetic + potential) / (v @ v)


def fd_ground_state(system: BoxSystem, M: int, tol=1e-12, max_iter=10_000):
    """Lowest eigenpair of the finite-difference Hamiltonian on ``M`` interior points.

    Returns ``(energy, x, psi)`` where ``psi`` is normalized so that
    ``sum(psi**2) * h == 1`` and has a positive largest-magnitude entry.
    """
    if M < 16:
        raise ContractError(f"need at least 16 grid points, got {M}")
    x, diag, off = fd_operator(system, M)
    if system.alpha >= 0:
        shift = 0.0
    else:
        gershgorin = np.min(diag - 2.0 * np.abs(off[0]))
        shift = gershgorin - 1.0
    shifted = diag - shift
    norm_A = np.max(np.abs(diag)) + 2.0 * np.abs(off[0])

    v = np.ones(M) / np.sqrt(M)
    energy = np.inf
    residual = np.inf
    for _ in range(max_iter):
        y = kernels.tridiag_solve(off, shifted, off, v)
        v = y / np.linalg.norm(y)
        new_energy = _tridiag_rayleigh(v, diag, off)
        Av = diag * v
        Av[:-1] += off * v[1:]
        Av[1:] += off * v[:-1]
        residual = np.linalg.norm(Av - new_energy * v)
        settled = abs(new_energy - energy) <= 1e-15 * abs(new_energy)
        energy = new_energy
        if residual <= tol * norm_A or settled:
            break
    else:
        raise ConvergenceError(f"inverse iteration did not converge in {max_iter} steps", residual)

    h = system.a / (M + 1)
    psi = v / np.sqrt(h)
    if psi[np.argmax(np.abs(psi))] < 0:
        psi = -psi
    return float(energy), x, psi
