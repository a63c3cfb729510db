from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .. import numerics
from .._kernels import apply_matrix
from .circuit import MAX_QUBITS, Circuit, GateOp


class PostselectionError(ValueError):
    pass


class NonUnitaryError(ValueError):
    pass


class StateVector:
    """``2**n`` complex amplitudes; qubit 0 is the most significant bit."""

    __slots__ = ("amplitudes", "num_qubits")

    def __init__(self, amplitudes, num_qubits: int | None = None, normalize: bool = False):
        amp = np.array(amplitudes, dtype=complex).ravel()
        n = int(round(np.log2(amp.size))) if amp.size else -1
        if n < 0 or amp.size != 1 << n:
            raise ValueError(f"amplitude count {amp.size} is not a power of two")
        if num_qubits is not None and num_qubits != n:
            raise ValueError(f"{amp.size} amplitudes do not describe {num_qubits} qubits")
        if n > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits are supported")
        norm = np.linalg.norm(amp)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amp /= norm
        elif abs(norm - 1) > 1e-8:
            raise ValueError(f"state is not normalized (norm {norm:.6g})")
        self.amplitudes = amp
        self.num_qubits = n

    @classmethod
    def zero(cls, num_qubits: int) -> StateVector:
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> StateVector:
        amp = np.zeros(1 << num_qubits, dtype=complex)
        amp[index] = 1
        return cls(amp)

    def copy(self) -> StateVector:
        out = StateVector.__new__(StateVector)
        out.amplitudes = self.amplitudes.copy()
        out.num_qubits = self.num_qubits
        return out

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.num_qubits}b")

    def marginal(self, qubits: Sequence[int]) -> np.ndarray:
        """Probability distribution over ``qubits`` (first listed = MSB)."""
        p = self.probabilities().reshape((2,) * self.num_qubits)
        other = tuple(q for q in range(self.num_qubits) if q not in qubits)
        p = p.sum(axis=other)
        kept = sorted(qubits)
        p = np.transpose(p, [kept.index(q) for q in qubits])
        return p.ravel()

    def _apply_inplace(self, g: GateOp) -> None:
        if max(g.qubits) >= self.num_qubits or min(g.qubits) < 0:
            raise IndexError(f"gate on qubits {g.qubits} outside {self.num_qubits}-qubit state")
        apply_matrix(self.amplitudes.reshape(-1, 1), g.unitary(), g.targets, g.controls, self.num_qubits)


def apply_gate(state: StateVector, g: GateOp) -> StateVector:
    out = state.copy()
    out._apply_inplace(g)
    return out


def apply_controlled_unitary(state: StateVector, u, controls: Sequence[int],
                             targets: Sequence[int]) -> StateVector:
    m = numerics.as_matrix(u)
    if m.shape[0] != 1 << len(targets):
        raise numerics.DimensionError(f"{m.shape[0]}x{m.shape[0]} unitary on {len(targets)} target(s)")
    if not numerics.is_unitary(m, 1e-8):
        raise NonUnitaryError("controlled operator is not unitary to 1e-8")
    return apply_gate(state, GateOp("matrix", tuple(targets), tuple(controls), matrix=m))


def run(c: Circuit, initial: StateVector | None = None) -> StateVector:
    if initial is None:
        initial = StateVector.zero(c.num_qubits)
    if initial.num_qubits != c.num_qubits:
        raise ValueError(f"circuit has {c.num_qubits} qubits, state has {initial.num_qubits}")
    out = initial.copy()
    for g in c.gates:
        out._apply_inplace(g)
    if c.global_phase:
        out.amplitudes *= np.exp(1j * c.global_phase)
    return out


def postselect(state: StateVector, qubit: int, outcome: int) -> tuple[StateVector, float]:
    """Condition on ``qubit`` measuring ``outcome``; the qubit stays in the register."""
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    n = state.num_qubits
    amp = state.amplitudes.reshape((2,) * n).copy()
    idx = [slice(None)] * n
    idx[qubit] = 1 - outcome
    amp[tuple(idx)] = 0
    amp = amp.ravel()
    prob = float(np.sum(np.abs(amp) ** 2))
    if prob <= 1e-12:
        raise PostselectionError(f"outcome {outcome} on qubit {qubit} has probability {prob:.3e}")
    return StateVector(amp / np.sqrt(prob)), prob
