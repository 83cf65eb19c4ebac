"""Both kernel backends must agree; the compiled one is optional."""
import numpy as np
import pytest

from vqs import _fallback, kernels

BACKENDS = kernels.available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return BACKENDS[request.param]


def test_active_backend_is_known():
    assert kernels.BACKEND in BACKENDS


def test_scalar_affine(backend):
    rng = np.random.default_rng(0)
    x, w, b = rng.normal(size=37), rng.normal(size=11), rng.normal(size=11)
    np.testing.assert_array_equal(backend.scalar_affine(x, w, b), x[:, None] * w[None, :] + b)


def test_relu_forward_and_backward(backend):
    z = np.array([[-1.0, 0.0, 2.0], [3.5, -0.0, -7.0]])
    out = backend.relu_forward(z)
    np.testing.assert_array_equal(out, [[0.0, 0.0, 2.0], [3.5, 0.0, 0.0]])
    g = np.arange(6.0).reshape(2, 3) + 1
    np.testing.assert_array_equal(backend.relu_backward(g, out), [[0.0, 0.0, 3.0], [4.0, 0.0, 0.0]])


def test_relu_propagates_nan(backend):
    out = backend.relu_forward(np.array([np.nan, -np.inf, np.inf]))
    assert np.isnan(out[0]) and out[1] == 0.0 and out[2] == np.inf


def test_jacobi_sweep_preserves_spectrum(backend):
    rng = np.random.default_rng(1)
    A = rng.normal(size=(9, 9))
    A = A + A.T
    expected = np.linalg.eigvalsh(A)
    W, V = A.copy(), np.eye(9)
    for _ in range(10):
        backend.jacobi_sweep(W, V)
    np.testing.assert_allclose(np.sort(np.diag(W)), expected, atol=1e-12)
    np.testing.assert_allclose(V @ np.diag(np.diag(W)) @ V.T, A, atol=1e-11)


def test_jacobi_backends_agree():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(12, 12))
    A = A + A.T
    results = []
    for mod in BACKENDS.values():
        W, V = A.copy(), np.eye(12)
        n = mod.jacobi_sweep(W, V)
        results.append((n, W, V))
    for n, W, V in results[1:]:
        assert n == results[0][0]
        np.testing.assert_allclose(W, results[0][1], atol=1e-13)
        np.testing.assert_allclose(V, results[0][2], atol=1e-13)


def test_tridiag_solve(backend):
    rng = np.random.default_rng(3)
    n = 50
    diag = 4 + rng.uniform(size=n)
    lower, upper = rng.uniform(-1, 1, size=(2, n - 1))
    rhs = rng.normal(size=n)
    A = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    np.testing.assert_allclose(backend.tridiag_solve(lower, diag, upper, rhs), np.linalg.solve(A, rhs), rtol=1e-12)


def test_tridiag_single_equation(backend):
    np.testing.assert_allclose(backend.tridiag_solve(np.array([]), np.array([2.0]), np.array([]), np.array([3.0])), [1.5])


def test_fallback_is_always_available():
    assert BACKENDS["python"] is _fallback
