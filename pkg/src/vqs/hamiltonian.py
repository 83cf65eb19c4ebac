"""Truncated Hamiltonian H = diag(E_n) + alpha X and its Rayleigh quotient."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vqs import autodiff as ad
from vqs.basis import BoxSystem, SpectralBasis
from vqs.errors import ContractError, DegenerateStateError

MIN_NORM = 1e-12


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    H: np.ndarray = field(repr=False)
    unperturbed: np.ndarray = field(repr=False)
    position: np.ndarray = field(repr=False)
    alpha: float

    @property
    def N(self) -> int:
        return self.H.shape[0]


def build_hamiltonian(basis: SpectralBasis, system: BoxSystem) -> HamiltonianMatrix:
    if basis.system.a != system.a:
        raise ContractError(f"basis built for a={basis.system.a}, system has a={system.a}")
    H0 = np.diag(basis.energies)
    X = np.array(basis.position_matrix)
    H = H0 + system.alpha * X
    for m in (H, H0, X):
        m.setflags(write=False)
    return HamiltonianMatrix(H, H0, X, system.alpha)


def _as_matrix(H):
    return H.H if isinstance(H, HamiltonianMatrix) else np.asarray(H, dtype=float)


def _check_norm(norm_sq):
    # non-finite norms propagate so callers can report divergence instead
    if np.sqrt(norm_sq) < MIN_NORM:
        raise DegenerateStateError(
            f"coefficient norm {np.sqrt(norm_sq):.3e} below {MIN_NORM:g}; "
            "the trial state has collapsed"
        )


def rayleigh_quotient(c, M) -> float:
    """c^T M c / c^T c for any symmetric matrix M."""
    c = np.asarray(c, dtype=float)
    norm_sq = c @ c
    _check_norm(norm_sq)
    return float(c @ (M @ c) / norm_sq)


def energy_expectation(c, H) -> float:
    """<H> for the state with basis coefficients ``c``."""
    return rayleigh_quotient(c, _as_matrix(H))


def diagonal_energy(c, energies) -> float:
    """Energy of ``c`` under a diagonal Hamiltonian, sum |c_n|^2 E_n / sum |c_n|^2."""
    weights = np.asarray(c, dtype=float) ** 2
    total = weights.sum()
    _check_norm(total)
    return float(weights @ np.asarray(energies) / total)


def energy_node(c: ad.Node, H) -> ad.Node:
    """Differentiable Rayleigh quotient for training."""
    _check_norm(float(c.value @ c.value))
    Hc = ad.matvec(_as_matrix(H), c)
    return ad.div(ad.dot(c, Hc), ad.dot(c, c))


def expectation_position(c, basis: SpectralBasis) -> float:
    """<x> = c^T X c / c^T c; the perturbation energy is alpha times this."""
    return rayleigh_quotient(c, basis.position_matrix)


def local_position_estimates(c, basis: SpectralBasis, cutoff=1e-12):
    """Per-basis-state local estimator x_loc(b_n) = sum_m x_nm c_m / c_n.

    Entries with ``|c_n| < cutoff`` are NaN.  Weighting the finite entries by
    ``c_n^2`` and normalizing reproduces :func:`expectation_position`, up to
    the weight carried by the skipped components.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (basis.N,):
        raise ContractError(f"expected {basis.N} coefficients, got shape {c.shape}")
    numer = basis.position_matrix @ c
    out = np.full(basis.N, np.nan)
    ok = np.abs(c) >= cutoff
    out[ok] = numer[ok] / c[ok]
    return out
