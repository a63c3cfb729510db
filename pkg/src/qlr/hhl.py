"""HHL circuit construction, execution and solution read-out.

Qubit layout (big-endian, qubit 0 is the most significant bit):

    q0                ancilla
    q1 .. qt          clock register, q1 most significant
    q(t+1) ..         input register, first qubit most significant

The clock qubit of weight ``2^k`` controls ``U^(2^k)`` with
``U = exp(i A t0 / 2^t)``, so an eigenvalue ``lam`` lands in the clock as the
integer ``lam * t0 / (2 pi)``. The ancilla rotations are conditioned on single
clock qubits, which is exact when every eigenvalue encodes as a single set bit.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .gloa.genome import GeneString, aligned_phase, string_to_unitary
from .gloa.pauli import build_pauli_exponential_circuit
from .qsim import Circuit, GateOp, PostselectionError, inverse_qft, run, sample
from .regression import NormalEquations, solve_least_squares_classical

UNITARY_MODES = ("exact-spectral", "gene-string", "exact-pauli-circuit")
ROTATION_MODES = ("exact-arcsin", "paper-small-angle")
POSTSELECT_FLOOR = 1e-9
_ENCODE_TOL = 1e-8


class UnphysicalRotationError(ValueError):
    pass


class EigenvalueEncodingError(ValueError):
    pass


@dataclass(frozen=True)
class HHLConfig:
    clock_qubits: int = 4
    evolution_time: float = 2 * math.pi
    r: int = 6
    C: float | None = None
    unitary_mode: str = "exact-spectral"
    rotation_mode: str = "exact-arcsin"
    shots: int | None = None
    seed: int | None = None
    gene_strings: tuple[GeneString, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gene_strings", tuple(self.gene_strings))
        if self.clock_qubits < 1:
            raise ValueError("clock_qubits must be >= 1")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.C is not None and not self.C > 0:
            raise ValueError("C must be positive")
        if not self.evolution_time > 0:
            raise ValueError("evolution_time must be positive")
        if self.unitary_mode not in UNITARY_MODES:
            raise ValueError(f"unitary_mode must be one of {UNITARY_MODES}")
        if self.rotation_mode not in ROTATION_MODES:
            raise ValueError(f"rotation_mode must be one of {ROTATION_MODES}")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be positive (or None for the exact statevector)")
        if self.unitary_mode == "gene-string" and len(self.gene_strings) not in (1, self.clock_qubits):
            raise ValueError(f"gene-string mode needs 1 or {self.clock_qubits} gene strings")

    @property
    def rotation_constant(self) -> float:
        return self.C if self.C is not None else 8 * math.pi / 2 ** self.r

    def clock_eigenvalue(self, k: int) -> float:
        """Eigenvalue encoded by the clock qubit of weight ``2^k``."""
        return 2 ** k * 2 * math.pi / self.evolution_time

    def to_json(self) -> dict:
        return {
            "clock_qubits": self.clock_qubits,
            "evolution_time": self.evolution_time,
            "r": self.r,
            "C": self.C,
            "unitary_mode": self.unitary_mode,
            "rotation_mode": self.rotation_mode,
            "shots": self.shots,
            "seed": self.seed,
            "gene_strings": [gs.dumps() for gs in self.gene_strings],
        }

    @classmethod
    def from_json(cls, obj: dict) -> HHLConfig:
        obj = dict(obj)
        obj["gene_strings"] = tuple(GeneString.loads(s) for s in obj.get("gene_strings", ()))
        return cls(**obj)


@dataclass
class HHLResult:
    postselect_probability: float
    normalized_solution: np.ndarray
    rescaled_solution: np.ndarray
    error_2norm: float
    classical_reference: np.ndarray
    clock_leakage: float = 0.0
    shots: int | None = None
    seed: int | None = None
    counts: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "postselect_probability": self.postselect_probability,
            "normalized_solution": numerics.vector_to_json(self.normalized_solution),
            "rescaled_solution": [float(x) for x in self.rescaled_solution],
            "error_2norm": self.error_2norm,
            "classical_reference": [float(x) for x in self.classical_reference],
            "clock_leakage": self.clock_leakage,
            "shots": self.shots,
            "seed": self.seed,
            "counts": dict(self.counts),
        }

    @classmethod
    def from_json(cls, obj: dict) -> HHLResult:
        return cls(
            postselect_probability=float(obj["postselect_probability"]),
            normalized_solution=numerics.vector_from_json(obj["normalized_solution"]).astype(complex),
            rescaled_solution=np.asarray(obj["rescaled_solution"], dtype=float),
            error_2norm=float(obj["error_2norm"]),
            classical_reference=np.asarray(obj["classical_reference"], dtype=float),
            clock_leakage=float(obj.get("clock_leakage", 0.0)),
            shots=obj.get("shots"),
            seed=obj.get("seed"),
            counts={str(k): int(v) for k, v in obj.get("counts", {}).items()},
        )


@dataclass(frozen=True)
class Layout:
    ancilla: int
    clock: tuple[int, ...]
    input: tuple[int, ...]

    @property
    def num_qubits(self) -> int:
        return 1 + len(self.clock) + len(self.input)

    @classmethod
    def for_problem(cls, dim: int, clock_qubits: int) -> Layout:
        n_in = dim.bit_length() - 1
        if dim < 2 or 1 << n_in != dim:
            raise numerics.DimensionError(f"system dimension {dim} is not a power of two")
        clock = tuple(range(1, 1 + clock_qubits))
        return cls(0, clock, tuple(range(1 + clock_qubits, 1 + clock_qubits + n_in)))

    def weight_qubit(self, k: int) -> int:
        """Clock qubit carrying weight ``2^k``."""
        return self.clock[len(self.clock) - 1 - k]


def _check_system(a) -> np.ndarray:
    m = numerics.as_matrix(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise numerics.DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not numerics.is_hermitian(m):
        raise numerics.NotHermitianError("HHL needs a Hermitian system matrix")
    return m


def rotation_angles(config: HHLConfig) -> list[float | None]:
    """Ancilla angle for each clock weight ``2^k``; ``None`` where ``C`` exceeds it."""
    c = config.rotation_constant
    out: list[float | None] = []
    for k in range(config.clock_qubits):
        lam = config.clock_eigenvalue(k)
        if c > lam:
            out.append(None)
        elif config.rotation_mode == "exact-arcsin":
            out.append(2 * math.asin(c / lam))
        else:
            out.append(2 * c / lam)
    return out


def check_eigenvalues(a, config: HHLConfig) -> np.ndarray:
    """Validate that the spectrum fits the clock register and the rotation constant."""
    lam = numerics.eigh(a).eigenvalues
    lam_min = float(np.min(np.abs(lam)))
    if config.rotation_constant > lam_min:
        raise UnphysicalRotationError(
            f"unphysical rotation: C = {config.rotation_constant:.6g} exceeds the smallest "
            f"eigenvalue magnitude {lam_min:.6g}"
        )
    m = lam * config.evolution_time / (2 * math.pi)
    for value, lv in zip(m, lam):
        k = round(math.log2(value)) if value > 0 else -1
        if not (0 <= k < config.clock_qubits and abs(value - 2 ** k) <= _ENCODE_TOL * max(1.0, value)):
            raise EigenvalueEncodingError(
                f"eigenvalue {lv:.10g} does not encode as a single clock bit "
                f"(t = {config.clock_qubits}, t0 = {config.evolution_time:.6g})"
            )
    return lam


def state_prep(b, qubits: Sequence[int]) -> list[GateOp]:
    """Gates taking the input register from ``|0..0>`` to ``b / ||b||``."""
    v = np.asarray(b, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("right-hand side is zero")
    v = v / nrm
    n = len(qubits)
    if np.allclose(v, v[0], atol=1e-12) and abs(v[0].imag) < 1e-12 and v[0].real > 0:
        return [GateOp("H", (q,)) for q in qubits]
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if len(nz) == 1 and abs(v[nz[0]] - 1) < 1e-12:
        bits = format(int(nz[0]), f"0{n}b")
        return [GateOp("X", (q,)) for q, bit in zip(qubits, bits) if bit == "1"]
    return [GateOp("matrix", tuple(qubits), matrix=_householder_prep(v))]


def _householder_prep(v: np.ndarray) -> np.ndarray:
    """Unitary whose first column is ``v`` (unit norm)."""
    dim = len(v)
    phase = v[0] / abs(v[0]) if abs(v[0]) > 1e-15 else 1.0
    u = v.copy()
    u[0] -= phase
    nu = np.vdot(u, u).real
    if nu < 1e-30:
        return phase * np.eye(dim, dtype=complex)
    h = np.eye(dim, dtype=complex) - 2 * np.outer(u, u.conj()) / nu
    return phase * h


def _power_blocks(a: np.ndarray, config: HHLConfig, layout: Layout) -> list[GateOp]:
    """Controlled ``U^(2^k)`` for every clock qubit, lowest weight first."""
    t = config.clock_qubits
    base = config.evolution_time / 2 ** t
    ops: list[GateOp] = []
    for k in range(t):
        ctl = layout.weight_qubit(k)
        theta = base * 2 ** k
        if config.unitary_mode == "exact-spectral":
            ops.append(GateOp("matrix", layout.input, (ctl,), matrix=numerics.matrix_exp_i(a, theta)))
        elif config.unitary_mode == "exact-pauli-circuit":
            if a.shape != (4, 4):
                raise numerics.DimensionError("the Pauli circuit mode supports 4x4 systems only")
            circ = build_pauli_exponential_circuit(a, theta)
            ops += [_relocate(g, layout.input).controlled(ctl) for g in circ.gates]
            if circ.global_phase:
                ops.append(GateOp("P", (ctl,), params=(circ.global_phase,)))
        else:
            ops += _gene_string_block(a, config, layout, k, ctl)
    return ops


def _relocate(g: GateOp, qubits: Sequence[int]) -> GateOp:
    return GateOp(g.kind, tuple(qubits[q] for q in g.targets), tuple(qubits[q] for q in g.controls),
                  g.params, g.matrix)


def _gene_string_block(a, config: HHLConfig, layout: Layout, k: int, ctl: int) -> list[GateOp]:
    strings = config.gene_strings
    if strings[0].num_qubits != len(layout.input):
        raise numerics.DimensionError(
            f"gene string acts on {strings[0].num_qubits} qubits, input register has {len(layout.input)}"
        )
    if len(strings) == 1:
        gs, reps = strings[0], 2 ** k
    else:
        gs, reps = strings[k], 1
    body = [g.controlled(ctl) for g in gs.gate_ops(layout.input)] * reps
    # A bare string only matches U up to a global phase, which a control turns into a relative phase.
    approx = np.linalg.matrix_power(string_to_unitary(gs), reps)
    target = numerics.matrix_exp_i(a, config.evolution_time * 2 ** k / 2 ** config.clock_qubits)
    phi = aligned_phase(approx, target)
    return body + [GateOp("P", (ctl,), params=(phi,))]


def _qpe(a: np.ndarray, config: HHLConfig, layout: Layout) -> list[GateOp]:
    ops = [GateOp("H", (q,)) for q in layout.clock]
    ops += _power_blocks(a, config, layout)
    ops += inverse_qft(layout.clock)
    return ops


def _registers(layout: Layout) -> dict[str, tuple[int, ...]]:
    return {"ancilla": (layout.ancilla,), "clock": layout.clock, "input": layout.input}


def build_hhl_circuit(a, config: HHLConfig = HHLConfig(), b=None) -> Circuit:
    """State prep, phase estimation, ancilla rotations and uncomputation.

    ``b`` defaults to the uniform superposition prepared by Hadamards.
    """
    m = _check_system(a)
    layout = Layout.for_problem(m.shape[0], config.clock_qubits)
    check_eigenvalues(m, config)
    if b is None:
        b = np.ones(m.shape[0])
    circ = Circuit(layout.num_qubits, registers=_registers(layout))
    circ.extend(state_prep(b, layout.input))
    qpe = _qpe(m, config, layout)
    circ.extend(qpe)
    for k, theta in enumerate(rotation_angles(config)):
        if theta is not None:
            circ.append(GateOp("Ry", (layout.ancilla,), (layout.weight_qubit(k),), (theta,)))
    circ.extend(g.inverse() for g in reversed(qpe))
    return circ


def verify_qpe(a, j: int | None = None, config: HHLConfig = HHLConfig(), b=None) -> dict[str, float]:
    """Clock-register distribution after phase estimation alone.

    ``j`` selects the ``j``-th eigenvector (1-based, ascending eigenvalue) as
    the input state; ``None`` uses ``b`` (uniform by default).
    """
    m = _check_system(a)
    layout = Layout.for_problem(m.shape[0], config.clock_qubits)
    if j is not None:
        es = numerics.eigh(m)
        if not 1 <= j <= m.shape[0]:
            raise IndexError(f"eigenvector index {j} outside 1..{m.shape[0]}")
        b = es.eigenvectors[:, j - 1]
    elif b is None:
        b = np.ones(m.shape[0])
    circ = Circuit(layout.num_qubits, registers=_registers(layout))
    circ.extend(state_prep(b, layout.input))
    circ.extend(_qpe(m, config, layout))
    probs = run(circ).marginal(layout.clock)
    t = config.clock_qubits
    return {format(i, f"0{t}b"): float(p) for i, p in enumerate(probs)}


def rescale_solution(normalized, reference) -> tuple[np.ndarray, float]:
    """Map a normalized (possibly phase-rotated) state onto the reference scale.

    The phase of the largest component is removed, the real part kept, the
    overall sign chosen to agree with ``reference``, and the result scaled to
    ``||reference||``. Returns ``(rescaled, ||rescaled - reference||)``.
    """
    v = np.asarray(normalized, dtype=complex)
    ref = np.asarray(reference, dtype=float)
    rn = np.linalg.norm(ref)
    if rn == 0:
        raise ValueError("reference must be nonzero")
    vn = np.linalg.norm(v)
    if vn == 0:
        raise ValueError("solution vector is zero")
    v = v / vn
    lead = v[int(np.argmax(np.abs(v)))]
    x = (v * np.conj(lead) / abs(lead)).real
    if np.dot(x, ref) < 0:
        x = -x
    x = x * rn
    return x, float(np.linalg.norm(x - ref))


def display_reference(beta) -> np.ndarray:
    """Classical solution scaled so its smallest nonzero magnitude is one."""
    beta = np.asarray(beta, dtype=float)
    mags = np.abs(beta)
    nz = mags[mags > 1e-12 * mags.max()]
    return beta / nz.min()


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    lead = v[int(np.argmax(np.abs(v)))]
    return v * (np.conj(lead) / abs(lead))


def run_hhl(problem: NormalEquations, config: HHLConfig = HHLConfig()) -> HHLResult:
    """Execute the circuit and read the input register conditioned on ancilla = 1.

    Exact mode reads the amplitudes with the clock back at zero. Sampled mode
    estimates magnitudes from shot counts with ancilla = 1 (clock summed out)
    and borrows each component's phase from the exact statevector, since
    counts carry no sign information.
    """
    a = _check_system(problem.A)
    b = np.asarray(problem.b)
    classical = solve_least_squares_classical(problem)
    reference = display_reference(classical.beta_hat)

    circ = build_hhl_circuit(a, config, b)
    layout = Layout.for_problem(a.shape[0], config.clock_qubits)
    final = run(circ)
    nq, t, n_in = layout.num_qubits, len(layout.clock), len(layout.input)
    amp = final.amplitudes.reshape(2, 2 ** t, 2 ** n_in)
    p_anc = float(np.sum(np.abs(amp[1]) ** 2))
    if p_anc < POSTSELECT_FLOOR:
        raise PostselectionError(f"postselection failure: P(ancilla = 1) = {p_anc:.3e}")
    clean = amp[1, 0, :]
    p_clean = float(np.sum(np.abs(clean) ** 2))
    leakage = 1.0 - p_clean / p_anc
    if p_clean < POSTSELECT_FLOOR * p_anc:
        raise PostselectionError("postselection failure: no amplitude with the clock uncomputed")
    exact = _canonical_phase(clean / math.sqrt(p_clean))

    if config.shots is None:
        rescaled, err = rescale_solution(exact, reference)
        return HHLResult(p_anc, exact, rescaled, err, reference, leakage)

    seed = config.seed if config.seed is not None else int(np.random.SeedSequence().entropy % 2 ** 63)
    record = sample(final, config.shots, seed)
    hits = np.zeros(2 ** n_in)
    for bits, cnt in record.counts.items():
        if bits[layout.ancilla] == "1":
            hits[int(bits[nq - n_in:], 2)] += cnt
    total = hits.sum()
    if total == 0:
        raise PostselectionError(f"postselection failure: no ancilla = 1 outcome in {config.shots} shots")
    phases = np.where(np.abs(exact) > 0, exact / np.where(np.abs(exact) > 0, np.abs(exact), 1), 1.0)
    sampled = np.sqrt(hits / total) * phases
    rescaled, err = rescale_solution(sampled, reference)
    counts = {k: v for k, v in record.counts.items()}
    return HHLResult(total / config.shots, sampled, rescaled, err, reference, leakage,
                     config.shots, seed, counts)
