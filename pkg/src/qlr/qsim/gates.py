"""Gate vocabulary and matrix conventions.

Multi-qubit matrices are written with the first listed qubit as the most
significant bit. Rotations use the half-angle form, e.g.
``Ry(theta) = [[cos theta/2, -sin theta/2], [sin theta/2, cos theta/2]]``.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

ONE_QUBIT_KINDS = ("H", "X", "Y", "Z", "S", "Sdag", "T", "Tdag", "V", "Vdag", "Rx", "Ry", "Rz", "P")
TWO_QUBIT_KINDS = ("Rzz", "CNOT", "CZ", "CPhase", "SWAP")
PARAMETRIC_KINDS = frozenset({"Rx", "Ry", "Rz", "P", "Rzz", "CPhase"})

# Numeric codes shared with the compiled kernels; order is part of the ABI.
KIND_CODES = ONE_QUBIT_KINDS + TWO_QUBIT_KINDS
CODE_OF = {k: i for i, k in enumerate(KIND_CODES)}

INVERSE_KIND = {"S": "Sdag", "Sdag": "S", "T": "Tdag", "Tdag": "T", "V": "Vdag", "Vdag": "V"}

_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "Sdag": np.diag([1, -1j]).astype(complex),
    "T": np.diag([1, cmath.exp(1j * math.pi / 4)]),
    "Tdag": np.diag([1, cmath.exp(-1j * math.pi / 4)]),
    "V": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    "Vdag": 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]]),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


class UnknownGateError(ValueError):
    pass


def arity(kind: str) -> int:
    return 1 if kind in PARAMETRIC_KINDS else 0


def num_qubits_of(kind: str) -> int:
    if kind in ONE_QUBIT_KINDS:
        return 1
    if kind in TWO_QUBIT_KINDS:
        return 2
    raise UnknownGateError(f"unknown gate kind {kind!r}")


def gate_matrix(kind: str, params=()) -> np.ndarray:
    if kind not in CODE_OF:
        raise UnknownGateError(f"unknown gate kind {kind!r}")
    params = tuple(params)
    if len(params) != arity(kind):
        raise ValueError(f"{kind} takes {arity(kind)} parameter(s), got {len(params)}")
    if kind in _FIXED:
        return _FIXED[kind].copy()
    th = float(params[0])
    c, s = math.cos(th / 2), math.sin(th / 2)
    if kind == "Rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "Ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "Rz":
        return np.diag([cmath.exp(-0.5j * th), cmath.exp(0.5j * th)])
    if kind == "P":
        return np.diag([1, cmath.exp(1j * th)]).astype(complex)
    if kind == "Rzz":
        a, b = cmath.exp(-0.5j * th), cmath.exp(0.5j * th)
        return np.diag([a, b, b, a])
    # CPhase
    return np.diag([1, 1, 1, cmath.exp(1j * th)]).astype(complex)
