import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vqs.basis import BoxSystem, SpectralBasis
from vqs.errors import ContractError
from vqs.hamiltonian import build_hamiltonian
from vqs.oracle import fd_ground_state, jacobi_eigen

TABLE = [
    (BoxSystem(), 4.93480),
    (BoxSystem(a=1.0, alpha=8.0), 8.79507),
    (BoxSystem(a=10.0, alpha=2.0), 2.94583),
]


def box_hamiltonian(system, N=100):
    basis = SpectralBasis.build(system, N)
    return build_hamiltonian(basis, system)


def test_diagonal_matrix():
    d = np.array([3.0, -1.0, 2.5])
    res = jacobi_eigen(np.diag(d))
    np.testing.assert_array_equal(res.eigenvalues, np.sort(d))
    np.testing.assert_array_equal(np.abs(res.eigenvectors), np.eye(3)[:, [1, 2, 0]])
    assert res.iterations == 0


def test_two_by_two():
    res = jacobi_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(res.eigenvalues, [1.0, 3.0], rtol=1e-15)


def test_non_symmetric_rejected():
    with pytest.raises(ContractError):
        jacobi_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("system, published", TABLE)
def test_jacobi_properties_on_box_hamiltonians(system, published):
    H = box_hamiltonian(system)
    res = jacobi_eigen(H)
    norm = np.linalg.norm(H.H)
    V, lam = res.eigenvectors, res.eigenvalues
    residuals = np.linalg.norm(H.H @ V - V * lam, axis=0)
    assert np.all(residuals <= 1e-10 * norm)
    np.testing.assert_allclose(V.T @ V, np.eye(100), atol=1e-10)
    assert np.sum(lam) == pytest.approx(np.trace(H.H), rel=1e-9)
    assert np.all(np.diff(lam) >= 0)
    assert res.ground_energy == pytest.approx(published, abs=1e-4)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(H.H), atol=1e-10 * norm)


def test_unperturbed_ground_energy_is_exact():
    res = jacobi_eigen(box_hamiltonian(BoxSystem()))
    assert res.ground_energy == pytest.approx(np.pi**2 / 2, abs=1e-9)


@pytest.mark.parametrize("system, _", TABLE)
def test_truncation_is_variational(system, _):
    energies = [jacobi_eigen(box_hamiltonian(system, N)).ground_energy for N in (10, 25, 50, 100)]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31))
def test_random_symmetric_against_numpy(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    A = A + A.T
    res = jacobi_eigen(A)
    np.testing.assert_allclose(res.eigenvalues, np.linalg.eigvalsh(A), atol=1e-10 * max(1, np.linalg.norm(A)))


def test_fd_unperturbed():
    e, x, psi = fd_ground_state(BoxSystem(), 2000)
    assert e == pytest.approx(4.93480, abs=1e-5)
    assert e == pytest.approx(np.pi**2 / 2, abs=1e-5)
    h = x[1] - x[0]
    assert np.sum(psi**2) * h == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(psi, np.sqrt(2) * np.sin(np.pi * x), atol=1e-5)


def test_fd_system_b():
    e, _, _ = fd_ground_state(BoxSystem(a=10.0, alpha=2.0), 4000)
    assert e == pytest.approx(2.94583, abs=1e-4)


def test_fd_second_order_convergence():
    exact = np.pi**2 / 2
    errors = [fd_ground_state(BoxSystem(), M)[0] - exact for M in (500, 1000, 2000)]
    ratios = [errors[0] / errors[1], errors[1] / errors[2]]
    for r in ratios:
        assert abs(r - 4.0) < 0.2


def test_fd_negative_slope_uses_gershgorin_shift():
    system = BoxSystem(a=1.0, alpha=-8.0)
    e, _, _ = fd_ground_state(system, 4000)
    # reflection x -> a - x maps alpha -> -alpha with an energy offset alpha * a
    mirrored = jacobi_eigen(box_hamiltonian(BoxSystem(a=1.0, alpha=8.0))).ground_energy - 8.0
    assert e == pytest.approx(mirrored, abs=1e-4)
    assert e == pytest.approx(jacobi_eigen(box_hamiltonian(system)).ground_energy, abs=1e-4)


def test_fd_requires_enough_points():
    with pytest.raises(ContractError):
        fd_ground_state(BoxSystem(), 8)


@pytest.mark.parametrize("system, published", TABLE)
def test_oracles_agree(system, published):
    matrix = jacobi_eigen(box_hamiltonian(system)).ground_energy
    fd, _, _ = fd_ground_state(system, 4000)
    assert abs(matrix - fd) < 1e-4
    assert abs(fd - published) < 1e-4
