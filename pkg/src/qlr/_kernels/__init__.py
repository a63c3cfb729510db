"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise the numpy
fallback is used. Setting ``QLR_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback

try:
    if os.environ.get("QLR_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from . import _core as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"


def compiled_available() -> bool:
    try:
        from . import _core  # noqa: F401
    except ImportError:
        return False
    return True


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` ('compiled', 'python' or None for default)."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _core

        return _core
    raise ValueError(f"unknown kernel backend {name!r}")


def apply_matrix(psi: np.ndarray, mat, targets, controls, nq: int, backend=None) -> None:
    """In-place application on a C-contiguous ``(2**nq, m)`` complex array."""
    impl = backend or _impl
    impl.apply_matrix(
        psi,
        np.ascontiguousarray(mat, dtype=complex),
        np.asarray(targets, dtype=np.int_),
        np.asarray(controls, dtype=np.int_),
        int(nq),
    )


def strings_fidelity(codes, targets, controls, angles, nq: int, target, backend=None) -> np.ndarray:
    impl = backend or _impl
    return impl.strings_fidelity(
        np.ascontiguousarray(codes, dtype=np.int_),
        np.ascontiguousarray(targets, dtype=np.int_),
        np.ascontiguousarray(controls, dtype=np.int_),
        np.ascontiguousarray(angles, dtype=float),
        int(nq),
        np.ascontiguousarray(target, dtype=complex),
    )
