"""Exact circuits for ``exp(i A theta)`` when A's two-qubit Pauli terms commute."""
from __future__ import annotations

import math
from itertools import combinations

from .. import numerics
from ..qsim import Circuit, GateOp

_ROTATION = {"X": "Rx", "Y": "Ry", "Z": "Rz"}


class NonCommutingError(ValueError):
    pass


def paulis_commute(a: str, b: str) -> bool:
    clashes = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return clashes % 2 == 0


def _to_z(q: int, p: str) -> tuple[list[GateOp], list[GateOp]]:
    """Gates before/after that conjugate Pauli ``p`` on qubit ``q`` into Z."""
    if p == "X":
        return [GateOp("H", (q,))], [GateOp("H", (q,))]
    if p == "Y":
        return [GateOp("Rx", (q,), params=(math.pi / 2,))], [GateOp("Rx", (q,), params=(-math.pi / 2,))]
    return [], []


def build_pauli_exponential_circuit(a, theta: float) -> Circuit:
    """Product of one exponential factor per Pauli term of the 4x4 Hermitian ``a``.

    The identity term becomes ``Circuit.global_phase``; weight-one terms are
    single-qubit rotations and weight-two terms are a ``Rzz`` between basis
    changes. ``exp(i c P) = R_P(-2c)`` in the half-angle convention.
    """
    m = numerics.as_matrix(a)
    if m.shape != (4, 4):
        raise numerics.DimensionError("Pauli exponential compiler needs a 4x4 matrix")
    if not numerics.is_hermitian(m):
        raise numerics.NotHermitianError("Pauli exponential compiler needs a Hermitian matrix")
    terms = numerics.pauli_decompose_2q(m).terms()
    labels = [lbl for lbl in terms if lbl != "II"]
    for x, y in combinations(labels, 2):
        if not paulis_commute(x, y):
            raise NonCommutingError(f"Pauli terms {x} and {y} do not commute")

    circ = Circuit(2, registers={"input": (0, 1)})
    circ.global_phase = float(terms.get("II", 0.0)) * theta
    for lbl in labels:
        angle = -2.0 * float(terms[lbl]) * theta
        if angle == 0.0:
            continue
        active = [(q, p) for q, p in enumerate(lbl) if p != "I"]
        if len(active) == 1:
            q, p = active[0]
            circ.append(GateOp(_ROTATION[p], (q,), params=(angle,)))
            continue
        before, after = [], []
        for q, p in active:
            b, f = _to_z(q, p)
            before += b
            after += f
        circ.extend(before)
        circ.append(GateOp("Rzz", (0, 1), params=(angle,)))
        circ.extend(after)
    return circ
