"""Kernel backend selection.

The compiled ``vqs._kernels`` extension is used when it imports; otherwise
the numpy fallback in ``vqs._fallback`` is used.  Setting ``VQS_BACKEND=python``
forces the fallback.  ``BACKEND`` names the active choice.
"""
import os

from vqs import _fallback

if os.environ.get("VQS_BACKEND", "").lower() == "python":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from vqs import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

scalar_affine = _impl.scalar_affine
relu_forward = _impl.relu_forward
relu_backward = _impl.relu_backward
jacobi_sweep = _impl.jacobi_sweep
tridiag_solve = _impl.tridiag_solve


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    backends = {"python": _fallback}
    try:
        from vqs import _kernels
    except ImportError:
        pass
    else:
        backends["cython"] = _kernels
    return backends
