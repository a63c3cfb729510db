"""Group Leaders Optimization over gene strings.

A population of ``n`` groups with ``p`` members each is searched for a gene
string whose unitary matches a target up to global phase. Every iteration
mutates all members towards their group leader, performs one-way parameter
transfers between groups, and re-elects leaders. Changes are kept only when
they raise a member's trace fidelity, so stored fidelities never decrease.

Genomes are held as float arrays of shape ``(..., max_gates, 4)`` with
columns ``gate_index, target, control, angle``.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .. import numerics
from ..qsim import NonUnitaryError
from ..qsim.gates import TWO_QUBIT_KINDS
from .genome import DEFAULT_GATE_SET, TWO_PI, GeneString, batch_fidelity

log = logging.getLogger(__name__)

MAX_GATES_LIMIT = 20


@dataclass(frozen=True)
class GloaParams:
    n: int = 15
    p: int = 25
    max_gates: int = MAX_GATES_LIMIT
    gate_set: tuple[str, ...] = DEFAULT_GATE_SET
    r1: float = 0.8
    r2: float = 0.1
    r3: float = 0.1
    fidelity_threshold: float = 0.999
    max_iterations: int = 10000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gate_set", tuple(self.gate_set))
        if abs(self.r1 + self.r2 + self.r3 - 1.0) > 1e-12:
            raise ValueError(f"mutation weights must sum to 1, got {self.r1 + self.r2 + self.r3}")
        if min(self.r1, self.r2, self.r3) < 0:
            raise ValueError("mutation weights must be non-negative")
        if not 0 < self.fidelity_threshold <= 1:
            raise ValueError("fidelity_threshold must be in (0, 1]")
        if not 1 <= self.max_gates <= MAX_GATES_LIMIT:
            raise ValueError(f"max_gates must be in [1, {MAX_GATES_LIMIT}]")
        if self.n < 1 or self.p < 1:
            raise ValueError("need at least one group and one member")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if not self.gate_set:
            raise ValueError("gate set is empty")


class _Space:
    """Valid ranges of the four gene fields for a given qubit count."""

    def __init__(self, params: GloaParams, num_qubits: int):
        self.nq = num_qubits
        self.gate_set = params.gate_set
        self.two_qubit = np.array([k in TWO_QUBIT_KINDS for k in params.gate_set])
        allowed = np.flatnonzero(~self.two_qubit) if num_qubits == 1 else np.arange(len(params.gate_set))
        if allowed.size == 0:
            raise ValueError("gate set has no gate usable on a single qubit")
        self.allowed = allowed + 1  # 1-based indices

    def random(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        out = np.empty(shape + (4,))
        out[..., 0] = rng.choice(self.allowed, size=shape)
        out[..., 1] = rng.integers(1, self.nq + 1, size=shape)
        out[..., 2] = 0
        out[..., 3] = rng.uniform(0.0, TWO_PI, size=shape)
        self._draw_controls(out, np.ones(shape, dtype=bool), rng)
        return out

    def _draw_controls(self, g: np.ndarray, where: np.ndarray, rng: np.random.Generator) -> None:
        # Two-qubit kinds draw from the other qubits; single-qubit kinds also allow 0.
        idx = np.argwhere(where)
        if idx.size == 0:
            return
        sel = tuple(idx.T)
        two_q = self.two_qubit[g[sel + (0,)].astype(int) - 1]
        targets = g[sel + (1,)].astype(int)
        if self.nq == 1:
            g[sel + (2,)] = 0
            return
        lo = np.where(two_q, 1, 0)
        span = np.where(two_q, self.nq - 1, self.nq)
        draw = lo + (rng.random(len(targets)) * span).astype(int)
        draw = np.minimum(draw, lo + span - 1)
        # skip over the target index
        draw = np.where((draw >= targets) & (draw > 0), draw + 1, draw)
        g[sel + (2,)] = draw

    def repair(self, g: np.ndarray, rng: np.random.Generator) -> None:
        """Round, clamp and fix discrete fields in place; wrap angles."""
        g[..., :3] = np.floor(g[..., :3] + 0.5)
        g[..., 0] = np.clip(g[..., 0], 1, len(self.gate_set))
        bad_kind = ~np.isin(g[..., 0], self.allowed)
        if bad_kind.any():
            g[..., 0][bad_kind] = rng.choice(self.allowed, size=int(bad_kind.sum()))
        g[..., 1] = np.clip(g[..., 1], 1, self.nq)
        g[..., 2] = np.clip(g[..., 2], 0, self.nq)
        g[..., 3] = np.mod(g[..., 3], TWO_PI)
        g[..., 3][g[..., 3] >= TWO_PI] = 0.0
        two_q = self.two_qubit[g[..., 0].astype(int) - 1]
        invalid = (g[..., 2] == g[..., 1]) | (two_q & (g[..., 2] == 0))
        self._draw_controls(g, invalid, rng)

    def valid(self, g: np.ndarray) -> bool:
        two_q = self.two_qubit[g[..., 0].astype(int) - 1]
        return bool(np.all(
            np.isin(g[..., 0], self.allowed)
            & (g[..., 1] >= 1) & (g[..., 1] <= self.nq)
            & (g[..., 2] >= 0) & (g[..., 2] <= self.nq)
            & (g[..., 2] != g[..., 1])
            & ~(two_q & (g[..., 2] == 0))
            & (g[..., 3] >= 0) & (g[..., 3] < TWO_PI)
        ))


@dataclass
class Population:
    genomes: np.ndarray  # (n, p, G, 4)
    fidelities: np.ndarray  # (n, p)
    leaders: np.ndarray = field(default=None)  # (n,)

    def __post_init__(self):
        if self.leaders is None:
            self.elect_leaders()

    @property
    def shape(self) -> tuple[int, int]:
        return self.fidelities.shape

    def elect_leaders(self) -> None:
        self.leaders = np.argmax(self.fidelities, axis=1)

    def best(self) -> tuple[int, int]:
        i, j = np.unravel_index(int(np.argmax(self.fidelities)), self.fidelities.shape)
        return int(i), int(j)

    def copy(self) -> Population:
        return Population(self.genomes.copy(), self.fidelities.copy(), self.leaders.copy())


def _num_qubits(target: np.ndarray) -> int:
    n = target.shape[0]
    nq = int(round(math.log2(n)))
    if 1 << nq != n:
        raise numerics.DimensionError(f"target dimension {n} is not a power of two")
    return nq


def _check_target(target) -> np.ndarray:
    t = numerics.as_matrix(target)
    if not numerics.is_unitary(t, 1e-8):
        raise NonUnitaryError("target matrix is not unitary to 1e-8")
    return t


def random_gene_string(params: GloaParams, num_qubits: int, rng: np.random.Generator) -> GeneString:
    space = _Space(params, num_qubits)
    return GeneString.from_array(space.random(rng, (params.max_gates,)), num_qubits, params.gate_set)


def _mutate_arrays(members: np.ndarray, leader: np.ndarray, params: GloaParams, space: _Space,
                   rng: np.random.Generator) -> np.ndarray:
    rand = space.random(rng, members.shape[:-1])
    new = params.r1 * members + params.r2 * leader + params.r3 * rand
    space.repair(new, rng)
    return new


def mutate(member: GeneString, leader: GeneString, params: GloaParams, rng: np.random.Generator,
           target: np.ndarray | None = None) -> GeneString:
    """Weighted combination of member, leader and a fresh random string.

    With ``target`` given, the member is returned unchanged unless the
    candidate has strictly higher trace fidelity.
    """
    if len(member) != len(leader) or member.num_qubits != leader.num_qubits:
        raise ValueError("member and leader must have the same shape")
    space = _Space(params, member.num_qubits)
    cand = _mutate_arrays(member.to_array(), leader.to_array(), params, space, rng)
    out = GeneString.from_array(cand, member.num_qubits, params.gate_set)
    if target is not None:
        fids = batch_fidelity(np.stack([member.to_array(), cand]), params.gate_set,
                              member.num_qubits, numerics.as_matrix(target))
        if not fids[1] > fids[0]:
            return member
    return out


def _mutation_step(pop: Population, target: np.ndarray, params: GloaParams, space: _Space,
                   rngs: Sequence[np.random.Generator]) -> None:
    for i in range(pop.shape[0]):
        leader = pop.genomes[i, pop.leaders[i]].copy()
        cand = _mutate_arrays(pop.genomes[i], leader, params, space, rngs[i])
        fids = batch_fidelity(cand, params.gate_set, space.nq, target)
        better = fids > pop.fidelities[i]
        pop.genomes[i][better] = cand[better]
        pop.fidelities[i][better] = fids[better]
    pop.elect_leaders()


def crossover(pop: Population, target: np.ndarray, params: GloaParams, rng: np.random.Generator,
              num_qubits: int | None = None) -> Population:
    """One-way parameter transfers between groups; returns a new population.

    For each group, ``t`` (random in ``1..2*max_gates-1``) times: copy a
    random parameter of member ``k`` of a random group into member ``k`` of
    this group, keeping the change only if its fidelity strictly improves.
    """
    out = pop.copy()
    n, p = out.shape
    g_len = out.genomes.shape[2]
    nq = num_qubits if num_qubits is not None else _num_qubits(target)
    space = _Space(params, nq)
    bound = max(1, (4 * g_len) // 2 - 1)
    for i in range(n):
        t = int(rng.integers(1, bound + 1))
        for _ in range(t):
            x = int(rng.integers(n))
            k = int(rng.integers(p))
            pr = int(rng.integers(4 * g_len))
            gene, fld = divmod(pr, 4)
            donor_val = out.genomes[x, k, gene, fld]
            if donor_val == out.genomes[i, k, gene, fld]:
                continue
            cand = out.genomes[i, k].copy()
            cand[gene, fld] = donor_val
            if not space.valid(cand[gene]):
                continue
            f = batch_fidelity(cand[None], params.gate_set, nq, target)[0]
            if f > out.fidelities[i, k]:
                out.genomes[i, k] = cand
                out.fidelities[i, k] = f
    out.elect_leaders()
    return out


@dataclass
class EvolveResult:
    best: GeneString
    fidelity: float
    iterations: int
    history: list[float]
    population: Population | None = None


def _streams(seed: int, n: int) -> tuple[list[np.random.Generator], np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(n + 1)
    return [np.random.Generator(np.random.PCG64(c)) for c in children[:n]], \
        np.random.Generator(np.random.PCG64(children[n]))


def initial_population(target: np.ndarray, params: GloaParams) -> Population:
    nq = _num_qubits(target)
    space = _Space(params, nq)
    group_rngs, _ = _streams(params.seed, params.n)
    genomes = np.stack([space.random(r, (params.p, params.max_gates)) for r in group_rngs])
    return Population(genomes, batch_fidelity(genomes, params.gate_set, nq, target))


def evolve(target, params: GloaParams = GloaParams(),
           callback: Callable[[int, float], None] | None = None) -> EvolveResult:
    """Run GLOA until a leader reaches the threshold or ``max_iterations`` pass.

    Group ``i`` mutates with its own generator derived from ``params.seed``;
    crossover draws from a separate stream. Results depend only on the seed.
    """
    target = _check_target(target)
    nq = _num_qubits(target)
    space = _Space(params, nq)
    group_rngs, master = _streams(params.seed, params.n)
    genomes = np.stack([space.random(r, (params.p, params.max_gates)) for r in group_rngs])
    pop = Population(genomes, batch_fidelity(genomes, params.gate_set, nq, target))
    history = [float(pop.fidelities.max())]
    it = 0
    while it < params.max_iterations and history[-1] < params.fidelity_threshold:
        _mutation_step(pop, target, params, space, group_rngs)
        pop = crossover(pop, target, params, master, nq)
        it += 1
        history.append(float(pop.fidelities.max()))
        if callback is not None:
            callback(it, history[-1])
        if it % 500 == 0:
            log.debug("GLOA iteration %d best fidelity %.6f", it, history[-1])
    i, j = pop.best()
    best = GeneString.from_array(pop.genomes[i, j], nq, params.gate_set)
    return EvolveResult(best, float(pop.fidelities[i, j]), it, history, pop)
