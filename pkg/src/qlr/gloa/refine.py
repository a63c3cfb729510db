"""Continuous angle refinement of a fixed gate sequence."""
from __future__ import annotations

import math

import numpy as np

from .. import numerics
from ..qsim import Circuit
from ..qsim.gates import PARAMETRIC_KINDS
from .genome import TWO_PI, GateGene, GeneString, phase_aligned_distance, string_to_unitary

_INV_PHI = (math.sqrt(5) - 1) / 2
GRID_POINTS = 24


def golden_section(f, lo: float, hi: float, tol: float = 1e-11, max_iter: int = 200) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def refine_angles(gs: GeneString, target, tol: float = 1e-12, min_sweeps: int = 3,
                  max_sweeps: int = 50) -> GeneString:
    """Coordinate-wise golden-section descent on the rotation angles.

    The objective is the Hilbert-Schmidt distance between the target and the
    string's unitary after removing the best global phase. Gate kinds, targets
    and controls stay fixed; an angle change is kept only if it lowers the
    objective, so trace fidelity never drops.
    """
    target = numerics.as_matrix(target)
    genes = list(gs.genes)
    slots = [i for i, g in enumerate(genes) if gs.kind(g) in PARAMETRIC_KINDS]
    if not slots:
        return gs
    dim = target.shape[0]
    if dim != 1 << gs.num_qubits:
        raise numerics.DimensionError(f"string acts on {gs.num_qubits} qubits, target is {dim}x{dim}")

    def gate_unitary(g: GateGene) -> np.ndarray:
        ops = GeneString((g,), gs.num_qubits, gs.gate_set).gate_ops()
        return Circuit(gs.num_qubits, ops).unitary()

    mats = [gate_unitary(g) for g in genes]
    t_dag = target.conj().T

    def distance(overlap: float) -> float:
        # ||T - e^{i phi} U||_F^2 = 2N - 2|Tr(T^dagger U)| at the optimal phase
        return math.sqrt(max(0.0, 2 * dim - 2 * overlap))

    current = phase_aligned_distance(string_to_unitary(gs), target)
    for sweep in range(1, max_sweeps + 1):
        start = current
        for i in slots:
            # U = after @ G_i @ before, so Tr(T^dagger U) = Tr(G_i @ env)
            before = np.eye(dim, dtype=complex)
            for m in mats[:i]:
                before = m @ before
            after = np.eye(dim, dtype=complex)
            for m in mats[i + 1:]:
                after = m @ after
            env = before @ t_dag @ after
            g = genes[i]

            def f(angle: float, g=g, env=env) -> float:
                u = gate_unitary(GateGene(g.gate_index, g.target, g.control, _wrap(angle)))
                return distance(abs(np.sum(u * env.T)))

            step = TWO_PI / GRID_POINTS
            grid = [g.angle + k * step for k in range(GRID_POINTS)]
            k = int(np.argmin([f(a) for a in grid]))
            x, _ = golden_section(f, grid[k] - step, grid[k] + step)
            trial = GateGene(g.gate_index, g.target, g.control, _wrap(x))
            trial_genes = genes[:i] + [trial] + genes[i + 1:]
            trial_gs = GeneString(tuple(trial_genes), gs.num_qubits, gs.gate_set)
            fx = phase_aligned_distance(string_to_unitary(trial_gs), target)
            if fx < current:
                genes = trial_genes
                mats[i] = gate_unitary(trial)
                current = fx
        if sweep >= min_sweeps and start - current < tol:
            break
    return GeneString(tuple(genes), gs.num_qubits, gs.gate_set)


def _wrap(angle: float) -> float:
    a = math.fmod(angle, TWO_PI)
    if a < 0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a
