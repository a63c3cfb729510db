"""Shot sampling.

Draws use numpy's ``PCG64`` bit generator seeded directly with the record's
seed, so a ``(state, shots, seed)`` triple always reproduces the same counts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .state import StateVector


@dataclass(frozen=True)
class MeasurementRecord:
    shots: int
    counts: dict[str, int]
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")

    def to_json(self) -> dict:
        return {"shots": self.shots, "seed": self.seed, "counts": dict(sorted(self.counts.items()))}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> MeasurementRecord:
        return cls(int(obj["shots"]), {str(k): int(v) for k, v in obj["counts"].items()}, int(obj["seed"]))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sample(state: StateVector, shots: int, seed: int) -> MeasurementRecord:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = state.probabilities()
    p = p / p.sum()
    draws = make_rng(seed).multinomial(shots, p)
    counts = {state.bitstring(int(i)): int(c) for i, c in enumerate(draws) if c}
    return MeasurementRecord(int(shots), counts, int(seed))
