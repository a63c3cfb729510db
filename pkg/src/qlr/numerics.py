"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The helpers here
validate shape and finiteness at the boundary so the rest of the code can
assume well-formed square matrices.
"""
from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass
from typing import IO

import numpy as np

DEFAULT_TOL = 1e-10

PAULI_LABELS = ("I", "X", "Y", "Z")
PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class NotHermitianError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


class DimensionError(ValueError):
    pass


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite square complex matrix or raise."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    a = as_matrix(m)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(m)
    return bool(np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0]))) <= tol)


def _require_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> None:
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise NotHermitianError(
            f"matrix is not Hermitian: max |M_jk - conj(M_kj)| = {dev:.3e} > {tol:.1e}"
        )


@dataclass(frozen=True)
class HermitianEigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eigh(m, tol: float = DEFAULT_TOL, max_sweeps: int = 100) -> HermitianEigenSystem:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot element, then applies
    the classical real Jacobi rotation, so the combined 2x2 transform is
    unitary. Sweeps continue until the off-diagonal Frobenius mass falls below
    ``1e-14 * ||A||_F``.

    Returns eigenvalues in ascending order with matching eigenvector columns.
    """
    a = as_matrix(m)
    _require_hermitian(a, tol)
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    threshold = 1e-14 * norm

    offdiag = ~np.eye(n, dtype=bool)

    def off(x):
        return np.linalg.norm(x[offdiag])

    sweeps = 0
    while n > 1 and norm > 0 and off(a) >= threshold:
        if sweeps >= max_sweeps:
            raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # W = diag(1, conj(phase)) @ [[c, s], [-s, c]] restricted to (p, q)
                w = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ w
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = w.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                vc = v[:, [p, q]] @ w
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    evals = np.real(np.diag(a)).copy()
    order = np.argsort(evals, kind="stable")
    return HermitianEigenSystem(evals[order], v[:, order])


def matrix_exp_i(m, t: float) -> np.ndarray:
    """``exp(i A t)`` for Hermitian ``A``, via its spectral decomposition."""
    es = eigh(m)
    v = es.eigenvectors
    return (v * np.exp(1j * es.eigenvalues * t)) @ v.conj().T


def condition_number(m) -> float:
    es = eigh(m)
    mags = np.abs(es.eigenvalues)
    hi, lo = mags.max(), mags.min()
    if hi == 0 or lo < 1e-12 * hi:
        raise SingularMatrixError(
            f"undefined condition number: smallest |eigenvalue| {lo:.3e} is zero to tolerance"
        )
    return float(hi / lo)


def hermitian_embed(m) -> np.ndarray:
    """Return the Hermitian block matrix ``[[0, A^dagger], [A, 0]]``."""
    a = as_matrix(m)
    n = a.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = a.conj().T
    out[n:, :n] = a
    return out


@dataclass(frozen=True)
class PauliDecomposition2Q:
    """Coefficients ``a[i, j]`` of ``sum a_ij sigma_i (x) sigma_j``, index order I, X, Y, Z."""

    coefficients: np.ndarray

    def terms(self, tol: float = 1e-12) -> dict[str, complex]:
        out = {}
        for i, li in enumerate(PAULI_LABELS):
            for j, lj in enumerate(PAULI_LABELS):
                c = self.coefficients[i, j]
                if abs(c) > tol:
                    out[li + lj] = c.real if abs(c.imag) <= tol else c
        return out

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            for j in range(4):
                out += self.coefficients[i, j] * np.kron(PAULIS[i], PAULIS[j])
        return out


def pauli_decompose_2q(h) -> PauliDecomposition2Q:
    a = as_matrix(h)
    if a.shape != (4, 4):
        raise DimensionError(f"two-qubit Pauli decomposition needs a 4x4 matrix, got {a.shape}")
    coeffs = np.empty((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            coeffs[i, j] = np.trace(np.kron(PAULIS[i], PAULIS[j]) @ a) / 4.0
    return PauliDecomposition2Q(coeffs)


def hilbert_schmidt_distance(u, v) -> float:
    a, b = as_matrix(u), as_matrix(v)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


# -- JSON matrix format: {"dim": n, "entries": [[re, im], ...]} row-major ----------


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    return {
        "dim": int(a.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["dim"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"matrix JSON needs 'dim' and 'entries': {exc}") from None
    if n < 1 or len(entries) != n * n:
        raise DimensionError(f"matrix JSON: expected {n * n} entries, got {len(entries)}")
    vals = np.array([complex(float(re), float(im)) for re, im in entries], dtype=complex)
    return as_matrix(vals.reshape(n, n))


def load_matrix(fp: IO[str]) -> np.ndarray:
    return matrix_from_json(json.load(fp))


def dump_matrix(m, fp: IO[str]) -> None:
    json.dump(matrix_to_json(m), fp)
    fp.write("\n")


def vector_to_json(v: Iterable) -> list:
    arr = np.asarray(list(v))
    if np.iscomplexobj(arr):
        return [[float(z.real), float(z.imag)] for z in arr]
    return [float(x) for x in arr]


def vector_from_json(obj) -> np.ndarray:
    if obj and isinstance(obj[0], (list, tuple)):
        return np.array([complex(float(re), float(im)) for re, im in obj], dtype=complex)
    return np.array([float(x) for x in obj], dtype=float)
