"""Dense statevector simulator (up to 12 qubits)."""
from .circuit import MAX_QUBITS, Circuit, GateOp, inverse_qft, qft
from .gates import KIND_CODES, ONE_QUBIT_KINDS, TWO_QUBIT_KINDS, UnknownGateError, gate_matrix
from .sampling import MeasurementRecord, make_rng, sample
from .state import (
    NonUnitaryError,
    PostselectionError,
    StateVector,
    apply_controlled_unitary,
    apply_gate,
    postselect,
    run,
)

__all__ = [
    "KIND_CODES",
    "MAX_QUBITS",
    "ONE_QUBIT_KINDS",
    "TWO_QUBIT_KINDS",
    "Circuit",
    "GateOp",
    "MeasurementRecord",
    "NonUnitaryError",
    "PostselectionError",
    "StateVector",
    "UnknownGateError",
    "apply_controlled_unitary",
    "apply_gate",
    "gate_matrix",
    "inverse_qft",
    "make_rng",
    "postselect",
    "qft",
    "run",
    "sample",
]
