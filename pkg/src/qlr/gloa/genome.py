"""Gene strings: flat lists of ``<gate> <target> <control> <angle>`` quadruples.

Gate indices are 1-based into a gate set, qubit indices are 1-based with
qubit 1 the most significant, and a control of 0 means "no control". For the
two-qubit kinds (``Rzz``, ``CNOT``, ``CZ``, ``CPhase``, ``SWAP``) the control
field names the second qubit and is mandatory.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .. import numerics
from .._kernels import strings_fidelity
from ..qsim import Circuit, GateOp
from ..qsim.gates import CODE_OF, PARAMETRIC_KINDS, TWO_QUBIT_KINDS

TWO_PI = 2 * math.pi

DEFAULT_GATE_SET = ("Rx", "Ry", "Rz", "Rzz", "X", "Z", "H", "V", "Vdag", "CNOT", "CZ")


class InvalidGeneError(ValueError):
    pass


@dataclass(frozen=True)
class GateGene:
    gate_index: int
    target: int
    control: int
    angle: float


@dataclass(frozen=True)
class GeneString:
    genes: tuple[GateGene, ...]
    num_qubits: int
    gate_set: tuple[str, ...] = DEFAULT_GATE_SET

    def __post_init__(self):
        object.__setattr__(self, "genes", tuple(self.genes))
        object.__setattr__(self, "gate_set", tuple(self.gate_set))
        if not self.genes:
            raise InvalidGeneError("gene string must contain at least one gene")
        for k in self.gate_set:
            if k not in CODE_OF:
                raise InvalidGeneError(f"unknown gate kind {k!r} in gate set")
        for pos, g in enumerate(self.genes, start=1):
            problem = gene_problem(g, self.num_qubits, self.gate_set)
            if problem:
                raise InvalidGeneError(f"gene {pos}: {problem}")

    def __len__(self):
        return len(self.genes)

    def kind(self, gene: GateGene) -> str:
        return self.gate_set[gene.gate_index - 1]

    def to_array(self) -> np.ndarray:
        return np.array([[g.gate_index, g.target, g.control, g.angle] for g in self.genes], dtype=float)

    @classmethod
    def from_array(cls, arr: np.ndarray, num_qubits: int, gate_set: Sequence[str]) -> GeneString:
        genes = tuple(GateGene(int(r[0]), int(r[1]), int(r[2]), float(r[3])) for r in np.asarray(arr))
        return cls(genes, num_qubits, tuple(gate_set))

    def gate_ops(self, qubit_map: Sequence[int] | None = None) -> list[GateOp]:
        qmap = list(range(self.num_qubits)) if qubit_map is None else list(qubit_map)
        ops = []
        for g in self.genes:
            kind = self.kind(g)
            params = (g.angle,) if kind in PARAMETRIC_KINDS else ()
            t = qmap[g.target - 1]
            if kind in TWO_QUBIT_KINDS:
                ops.append(GateOp(kind, (qmap[g.control - 1], t), (), params))
            else:
                ctl = (qmap[g.control - 1],) if g.control else ()
                ops.append(GateOp(kind, (t,), ctl, params))
        return ops

    def kernel_arrays(self):
        return encode(self.to_array()[None], self.gate_set)

    def dumps(self) -> str:
        lines = [f"qubits={self.num_qubits} gateset={','.join(self.gate_set)}"]
        lines += [f"{g.gate_index} {g.target} {g.control} {g.angle!r}" for g in self.genes]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> GeneString:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
        if not lines:
            raise InvalidGeneError("empty gene-string file")
        header = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
        try:
            nq = int(header["qubits"])
            gate_set = tuple(header["gateset"].split(","))
        except (KeyError, ValueError):
            raise InvalidGeneError("header must be 'qubits=<n> gateset=<comma-list>'") from None
        genes = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 4:
                raise InvalidGeneError(f"gene line needs 4 fields: {ln!r}")
            try:
                genes.append(GateGene(int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])))
            except ValueError:
                raise InvalidGeneError(f"malformed gene line: {ln!r}") from None
        return cls(tuple(genes), nq, gate_set)


def gene_problem(g: GateGene, nq: int, gate_set: Sequence[str]) -> str | None:
    if not 1 <= g.gate_index <= len(gate_set):
        return f"gate index {g.gate_index} outside 1..{len(gate_set)}"
    if not 1 <= g.target <= nq:
        return f"target {g.target} outside 1..{nq}"
    if not 0 <= g.control <= nq:
        return f"control {g.control} outside 0..{nq}"
    if g.control == g.target:
        return "target and control coincide"
    if gate_set[g.gate_index - 1] in TWO_QUBIT_KINDS and g.control == 0:
        return f"{gate_set[g.gate_index - 1]} needs a second qubit in the control field"
    if not (0.0 <= g.angle < TWO_PI) or not math.isfinite(g.angle):
        return f"angle {g.angle} outside [0, 2pi)"
    return None


def encode(genomes: np.ndarray, gate_set: Sequence[str]):
    """Turn ``(..., G, 4)`` genomes into the kernel's 0-based ``(S, G)`` arrays."""
    codes_of_index = np.array([CODE_OF[k] for k in gate_set])
    g = np.asarray(genomes).reshape(-1, genomes.shape[-2], 4)
    idx = g[..., 0].astype(np.int_)
    return (
        codes_of_index[idx - 1],
        g[..., 1].astype(np.int_) - 1,
        g[..., 2].astype(np.int_) - 1,
        np.ascontiguousarray(g[..., 3]),
    )


def batch_fidelity(genomes: np.ndarray, gate_set: Sequence[str], num_qubits: int,
                   target: np.ndarray) -> np.ndarray:
    """Trace fidelities of a stack of genomes, shaped like ``genomes.shape[:-2]``."""
    codes, t, c, a = encode(genomes, gate_set)
    return strings_fidelity(codes, t, c, a, num_qubits, target).reshape(genomes.shape[:-2])


def string_to_unitary(gs: GeneString) -> np.ndarray:
    return Circuit(gs.num_qubits, gs.gate_ops()).unitary()


def trace_fidelity(ua, ut) -> float:
    """``|Tr(U_t U_a^dagger)| / N``, clipped to [0, 1] against rounding."""
    a, t = numerics.as_matrix(ua), numerics.as_matrix(ut)
    if a.shape != t.shape:
        raise numerics.DimensionError(f"dimension mismatch: {a.shape} vs {t.shape}")
    return float(min(1.0, abs(np.sum(t * a.conj())) / a.shape[0]))


def aligned_phase(ua, ut) -> float:
    """Phase ``phi`` minimising ``||U_t - exp(i phi) U_a||_F``."""
    return float(np.angle(np.sum(ut * np.conj(ua))))


def phase_aligned_distance(ua, ut) -> float:
    return float(np.linalg.norm(ut - np.exp(1j * aligned_phase(ua, ut)) * ua))


def circuit_to_gene_string(c: Circuit, gate_set: Sequence[str] = DEFAULT_GATE_SET) -> GeneString:
    """Express a circuit over the gate set as a gene string (global phase dropped)."""
    gate_set = tuple(gate_set)
    genes = []
    for op in c.gates:
        if op.kind not in gate_set:
            raise InvalidGeneError(f"{op.kind} is not in the gate set {gate_set}")
        idx = gate_set.index(op.kind) + 1
        angle = op.params[0] % TWO_PI if op.params else 0.0
        if angle >= TWO_PI:
            angle = 0.0
        if op.kind in TWO_QUBIT_KINDS:
            if op.controls:
                raise InvalidGeneError("two-qubit kinds cannot carry an extra control")
            genes.append(GateGene(idx, op.targets[1] + 1, op.targets[0] + 1, angle))
        else:
            if len(op.controls) > 1:
                raise InvalidGeneError("genes support at most one control")
            ctl = op.controls[0] + 1 if op.controls else 0
            genes.append(GateGene(idx, op.targets[0] + 1, ctl, angle))
    return GeneString(tuple(genes), c.num_qubits, gate_set)
