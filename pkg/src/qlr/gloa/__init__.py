"""Gate-sequence synthesis: GLOA search, angle refinement, exact Pauli circuits."""
from .algorithm import (
    MAX_GATES_LIMIT,
    EvolveResult,
    GloaParams,
    Population,
    crossover,
    evolve,
    initial_population,
    mutate,
    random_gene_string,
)
from .genome import (
    DEFAULT_GATE_SET,
    GateGene,
    GeneString,
    InvalidGeneError,
    aligned_phase,
    batch_fidelity,
    circuit_to_gene_string,
    phase_aligned_distance,
    string_to_unitary,
    trace_fidelity,
)
from .pauli import NonCommutingError, build_pauli_exponential_circuit, paulis_commute
from .refine import golden_section, refine_angles

__all__ = [
    "DEFAULT_GATE_SET",
    "MAX_GATES_LIMIT",
    "EvolveResult",
    "GateGene",
    "GeneString",
    "GloaParams",
    "InvalidGeneError",
    "NonCommutingError",
    "Population",
    "aligned_phase",
    "batch_fidelity",
    "build_pauli_exponential_circuit",
    "circuit_to_gene_string",
    "crossover",
    "evolve",
    "golden_section",
    "initial_population",
    "mutate",
    "paulis_commute",
    "phase_aligned_distance",
    "random_gene_string",
    "refine_angles",
    "string_to_unitary",
    "trace_fidelity",
]
