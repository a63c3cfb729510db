from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .. import numerics
from .._kernels import apply_matrix
from .gates import INVERSE_KIND, PARAMETRIC_KINDS, gate_matrix, num_qubits_of

MAX_QUBITS = 12


@dataclass(frozen=True, eq=False)
class GateOp:
    """One gate application.

    ``targets`` are the qubits the kind's matrix acts on, in matrix order
    (for ``CNOT`` that is ``(control, target)``). ``controls`` add further
    all-ones conditions. ``kind == "matrix"`` carries an explicit unitary.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if not self.targets:
            raise ValueError("gate needs at least one target")
        if len(set(self.targets)) != len(self.targets) or len(set(self.controls)) != len(self.controls):
            raise ValueError("repeated qubit in gate")
        if set(self.targets) & set(self.controls):
            raise ValueError("targets and controls must be disjoint")
        if self.kind == "matrix":
            if self.matrix is None:
                raise ValueError("matrix gate needs a matrix")
            m = numerics.as_matrix(self.matrix)
            if m.shape[0] != 1 << len(self.targets):
                raise numerics.DimensionError(
                    f"{m.shape[0]}x{m.shape[0]} matrix on {len(self.targets)} target(s)"
                )
            object.__setattr__(self, "matrix", m)
        elif num_qubits_of(self.kind) != len(self.targets):
            raise ValueError(f"{self.kind} acts on {num_qubits_of(self.kind)} qubit(s)")
        else:
            gate_matrix(self.kind, self.params)  # arity check

    def unitary(self) -> np.ndarray:
        if self.kind == "matrix":
            return self.matrix
        return gate_matrix(self.kind, self.params)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def inverse(self) -> GateOp:
        if self.kind == "matrix":
            return GateOp("matrix", self.targets, self.controls, matrix=self.matrix.conj().T)
        if self.kind in PARAMETRIC_KINDS:
            return GateOp(self.kind, self.targets, self.controls, tuple(-p for p in self.params))
        return GateOp(INVERSE_KIND.get(self.kind, self.kind), self.targets, self.controls)

    def controlled(self, *extra: int) -> GateOp:
        return GateOp(self.kind, self.targets, tuple(extra) + self.controls, self.params, self.matrix)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "targets": list(self.targets),
            "controls": list(self.controls),
            "params": list(self.params),
        }
        if self.kind == "matrix":
            out["matrix"] = numerics.matrix_to_json(self.matrix)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> GateOp:
        m = numerics.matrix_from_json(obj["matrix"]) if obj["kind"] == "matrix" else None
        return cls(obj["kind"], tuple(obj["targets"]), tuple(obj.get("controls", ())),
                   tuple(obj.get("params", ())), m)


@dataclass
class Circuit:
    num_qubits: int
    gates: list[GateOp] = field(default_factory=list)
    registers: dict[str, tuple[int, ...]] = field(default_factory=dict)
    global_phase: float = 0.0

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}]")
        for g in self.gates:
            self._check(g)

    def _check(self, g: GateOp) -> None:
        if max(g.qubits) >= self.num_qubits or min(g.qubits) < 0:
            raise IndexError(f"gate {g.kind} on qubits {g.qubits} outside {self.num_qubits}-qubit circuit")

    def append(self, g: GateOp) -> Circuit:
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[GateOp]) -> Circuit:
        for g in gates:
            self.append(g)
        return self

    def __len__(self):
        return len(self.gates)

    def inverse(self) -> Circuit:
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)],
                       dict(self.registers), -self.global_phase)

    def unitary(self, include_global_phase: bool = True) -> np.ndarray:
        n = 1 << self.num_qubits
        u = np.eye(n, dtype=complex)
        for g in self.gates:
            apply_matrix(u, g.unitary(), g.targets, g.controls, self.num_qubits)
        if include_global_phase and self.global_phase:
            u *= np.exp(1j * self.global_phase)
        return u

    def to_json(self) -> list:
        return [g.to_json() for g in self.gates]

    def dumps(self) -> str:
        return json.dumps({
            "num_qubits": self.num_qubits,
            "registers": {k: list(v) for k, v in self.registers.items()},
            "global_phase": self.global_phase,
            "gates": self.to_json(),
        })

    @classmethod
    def loads(cls, text: str) -> Circuit:
        obj = json.loads(text)
        if isinstance(obj, list):
            raise ValueError("a bare gate list has no qubit count; use from_gate_list")
        return cls(int(obj["num_qubits"]), [GateOp.from_json(g) for g in obj["gates"]],
                   {k: tuple(v) for k, v in obj.get("registers", {}).items()},
                   float(obj.get("global_phase", 0.0)))

    @classmethod
    def from_gate_list(cls, gates: list, num_qubits: int | None = None) -> Circuit:
        ops = [GateOp.from_json(g) for g in gates]
        if num_qubits is None:
            num_qubits = 1 + max((max(g.qubits) for g in ops), default=0)
        return cls(num_qubits, ops)


def qft(register: Sequence[int]) -> list[GateOp]:
    """Gates for the DFT ``|x> -> sum_y exp(2 pi i x y / 2^n) |y> / sqrt(2^n)``.

    ``register[0]`` is the most significant qubit.
    """
    reg = list(register)
    if not reg:
        raise ValueError("register must be non-empty")
    n = len(reg)
    ops: list[GateOp] = []
    for i in range(n):
        ops.append(GateOp("H", (reg[i],)))
        for j in range(i + 1, n):
            ops.append(GateOp("CPhase", (reg[j], reg[i]), params=(2 * math.pi / 2 ** (j - i + 1),)))
    for i in range(n // 2):
        ops.append(GateOp("SWAP", (reg[i], reg[n - 1 - i])))
    return ops


def inverse_qft(register: Sequence[int]) -> list[GateOp]:
    return [g.inverse() for g in reversed(qft(register))]
