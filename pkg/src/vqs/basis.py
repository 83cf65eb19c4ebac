"""Closed-form spectral data of the infinite square well on [0, a].

The eigenfunctions ``b_n(x) = sqrt(2/a) sin(n pi x / a)`` of the unperturbed
box serve as the computational basis for every other module.  Energies and
the position-operator matrix are evaluated analytically.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vqs.errors import ContractError


@dataclass(frozen=True)
class BoxSystem:
    """Physical parameters of a (possibly tilted) infinite well.

    ``alpha`` is the slope of the linear potential ``V(x) = alpha * x``
    added inside the well; zero gives the plain particle in a box.
    Natural units (``hbar = mu = 1``) are the default.
    """

    a: float = 1.0
    mu: float = 1.0
    hbar: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("a", "mu", "hbar"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ContractError(f"{name} must be positive and finite, got {value!r}")
        if not np.isfinite(self.alpha):
            raise ContractError(f"alpha must be finite, got {self.alpha!r}")

    @property
    def kinetic_prefactor(self) -> float:
        """hbar^2 / (2 mu)."""
        return self.hbar**2 / (2.0 * self.mu)

    def potential(self, x):
        """Potential inside the well (the walls are handled by the basis)."""
        return self.alpha * np.asarray(x, dtype=float)


def eigen_energy(n: int, system: BoxSystem) -> float:
    if n < 1:
        raise ContractError(f"quantum number must be >= 1, got {n}")
    return n**2 * np.pi**2 * system.hbar**2 / (2.0 * system.mu * system.a**2)


def eigen_energies(N: int, system: BoxSystem) -> np.ndarray:
    n = np.arange(1, N + 1, dtype=float)
    return n**2 * (np.pi**2 * system.hbar**2 / (2.0 * system.mu * system.a**2))


def basis_value(n, x, system: BoxSystem):
    """Evaluate ``b_n`` at ``x``; zero outside the open interval (0, a).

    ``n`` and ``x`` broadcast against each other.
    """
    n = np.asarray(n)
    if np.any(n < 1):
        raise ContractError("quantum numbers must be >= 1")
    x = np.asarray(x, dtype=float)
    a = system.a
    inside = (x > 0.0) & (x < a)
    values = np.sqrt(2.0 / a) * np.sin(n * np.pi * x / a)
    out = np.where(inside, values, 0.0)
    return float(out) if out.ndim == 0 else out


def position_matrix(N: int, system: BoxSystem) -> np.ndarray:
    """Matrix elements <b_n| x |b_m> for n, m = 1..N.

    Diagonal entries are a/2; off-diagonal entries vanish when n + m is even.
    The upper triangle is computed and mirrored so the result is exactly
    symmetric.
    """
    if N < 1:
        raise ContractError(f"basis size must be >= 1, got {N}")
    a = system.a
    n = np.arange(1, N + 1)
    diff = n[:, None] - n[None, :]
    total = n[:, None] + n[None, :]
    # (-1)^k - 1 is -2 for odd k and 0 for even k
    odd_diff = np.where(diff % 2 != 0, -2.0, 0.0)
    odd_total = np.where(total % 2 != 0, -2.0, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        X = (a / np.pi**2) * (odd_diff / diff.astype(float) ** 2 - odd_total / total.astype(float) ** 2)
    upper = np.triu(X, k=1)
    X = upper + upper.T
    X[np.diag_indices(N)] = a / 2.0
    return X


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """First ``N`` box eigenfunctions with their energies and position matrix."""

    system: BoxSystem
    N: int
    energies: np.ndarray = field(repr=False)
    position_matrix: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, system: BoxSystem, N: int) -> "SpectralBasis":
        if N < 1:
            raise ContractError(f"basis size must be >= 1, got {N}")
        energies = eigen_energies(N, system)
        X = position_matrix(N, system)
        energies.setflags(write=False)
        X.setflags(write=False)
        return cls(system, N, energies, X)

    def values(self, xs) -> np.ndarray:
        """N x len(xs) table of basis function values."""
        xs = np.asarray(xs, dtype=float)
        return basis_value(np.arange(1, self.N + 1)[:, None], xs[None, :], self.system)
