"""Midpoint-rule estimation of basis coefficients <b_n|psi> on [0, a]."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vqs import autodiff as ad
from vqs.basis import SpectralBasis
from vqs.errors import ContractError, DegenerateStateError


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """``G`` midpoints ``(g + 1/2) a / G`` with uniform weight ``a / G``."""

    a: float
    G: int
    points: np.ndarray = field(init=False, repr=False)
    weight: float = field(init=False)

    def __post_init__(self):
        if self.G < 1:
            raise ContractError(f"grid size must be >= 1, got {self.G}")
        if self.a <= 0:
            raise ContractError(f"domain length must be positive, got {self.a}")
        points = (np.arange(self.G) + 0.5) * (self.a / self.G)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weight", self.a / self.G)


class Projector:
    """Caches the weighted sample table ``dx * b_n(x_g)`` (N x G).

    Projection then costs one matrix-vector product per call.
    """

    def __init__(self, basis: SpectralBasis, grid: QuadratureGrid):
        if not np.isclose(basis.system.a, grid.a, rtol=0, atol=1e-12 * grid.a):
            raise ContractError("basis and grid cover different domains")
        self.basis = basis
        self.grid = grid
        table = basis.values(grid.points) * grid.weight
        table.setflags(write=False)
        self.table = table

    def project(self, psi_samples) -> np.ndarray:
        psi = np.asarray(psi_samples, dtype=float).reshape(-1)
        if psi.shape[0] != self.grid.G:
            raise ContractError(f"expected {self.grid.G} samples, got {psi.shape[0]}")
        if not np.any(psi):
            raise DegenerateStateError("wave function samples are identically zero")
        return self.table @ psi

    def project_node(self, psi: ad.Node) -> ad.Node:
        """Graph-building variant of :meth:`project`; ``psi`` has G entries."""
        if psi.value.size != self.grid.G:
            raise ContractError(f"expected {self.grid.G} samples, got {psi.value.size}")
        if not np.any(psi.value):
            raise DegenerateStateError("wave function samples are identically zero")
        if psi.value.ndim != 1:
            psi = ad.reshape(psi, (self.grid.G,))
        return ad.matvec(self.table, psi)


def project(psi_samples, basis: SpectralBasis, grid: QuadratureGrid) -> np.ndarray:
    """c_n = dx * sum_g b_n(x_g) psi(x_g)."""
    return Projector(basis, grid).project(psi_samples)


def reconstruct(c, basis: SpectralBasis, xs) -> np.ndarray:
    """Psi(x) = sum_n c_n b_n(x)."""
    c = np.asarray(c, dtype=float)
    if c.shape != (basis.N,):
        raise ContractError(f"expected {basis.N} coefficients, got shape {c.shape}")
    return c @ basis.values(xs)
