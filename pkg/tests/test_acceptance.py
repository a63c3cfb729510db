"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances.

The lines are printed in the terminal summary under "acceptance criteria".
"""
import math
import subprocess
import sys
import time

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qlr import numerics, regression
from qlr.cli import RunReport, main
from qlr.gloa import (
    DEFAULT_GATE_SET,
    GloaParams,
    build_pauli_exponential_circuit,
    circuit_to_gene_string,
    evolve,
    refine_angles,
    string_to_unitary,
    trace_fidelity,
)
from qlr.hhl import HHLConfig, run_hhl, verify_qpe
from qlr.qsim import gate_matrix

from conftest import record_criterion

EXACT = np.array([-1.0, 7.0, 11.0, 13.0])

# Eigenvectors as printed alongside eigenvalues 1, 2, 4, 8 (in that order).
PRINTED_U = np.array([
    [-1, -1, -1, 1],
    [1, 1, -1, 1],
    [1, -1, 1, 1],
    [-1, 1, 1, 1],
], dtype=float) / 2


def test_criterion_1_exact_pipeline(tmp_path):
    out = tmp_path / "report.json"
    t0 = time.perf_counter()
    code = main(["solve", "--builtin", "paper", "--mode", "exact", "--exact-statevector", "--seed", "0",
                 "--out", str(out)])
    elapsed = time.perf_counter() - t0
    rep = RunReport.loads(out.read_text())
    x = rep.result().normalized_solution
    dev = float(np.max(np.abs(x - EXACT / math.sqrt(340))))
    ok = code == 0 and dev <= 1e-6 and elapsed < 1.0
    record_criterion(1, ok, f"max component deviation {dev:.2e} (tol 1e-6), {elapsed * 1e3:.0f} ms (limit 1 s)")
    assert ok


def test_criterion_2_eigensystem():
    es = numerics.eigh(regression.PAPER_A)
    ev_err = float(np.max(np.abs(es.eigenvalues - [1, 2, 4, 8])))
    labeled = [float(abs(np.vdot(PRINTED_U[j], es.eigenvectors[:, j])) ** 2) for j in range(4)]
    # overlap of each printed vector with the eigenspace it is best aligned to, ignoring labels
    unlabeled = [max(abs(np.vdot(PRINTED_U[j], es.eigenvectors[:, k])) ** 2 for k in range(4)) for j in range(4)]
    ev_ok = ev_err <= 1e-10
    vec_ok = min(labeled) >= 1 - 1e-10
    ok = ev_ok and vec_ok
    record_criterion(
        2, ok,
        f"eigenvalue error {ev_err:.1e} ({'ok' if ev_ok else 'bad'}); labeled eigenvector overlaps "
        f"{[round(o, 10) for o in labeled]} (need >= 1-1e-10); as an unlabeled set "
        f"min overlap {min(unlabeled):.12f}",
    )
    assert ev_ok
    assert min(unlabeled) >= 1 - 1e-10
    assert vec_ok, "printed eigenvector labels do not match the eigenvalues they are listed with"


def test_criterion_3_normal_equations():
    ne = regression.build_normal_equations(regression.paper_dataset())
    a_err = float(np.max(np.abs(ne.A - regression.PAPER_A)))
    b_err = float(np.max(np.abs(ne.b - regression.PAPER_B)))
    beta = regression.solve_least_squares_classical(regression.paper_system()).beta_hat
    beta_err = float(np.max(np.abs(beta - EXACT / 32)))
    ok = a_err <= 1e-12 and b_err <= 1e-12 and beta_err <= 1e-12
    record_criterion(
        3, ok,
        f"A from data rows max error {a_err:.3g}, b max error {b_err:.1e}, "
        f"classical oracle error {beta_err:.1e} (all tol 1e-12)",
    )
    assert b_err <= 1e-12
    assert beta_err <= 1e-12
    assert a_err <= 1e-12, "published data rows have orthogonal columns; their Gram matrix is diagonal"


def test_criterion_4_qpe():
    probs = {}
    for j, key in zip(range(1, 5), ["0001", "0010", "0100", "1000"]):
        probs[key] = verify_qpe(regression.PAPER_A, j)[key]
    ok = min(probs.values()) >= 0.999
    record_criterion(4, ok, "P(clock) for u1..u4: " + ", ".join(f"|{k}> {v:.12f}" for k, v in probs.items()))
    assert ok


def test_criterion_5_pauli_decomposition():
    d = numerics.pauli_decompose_2q(regression.PAPER_A)
    expected = np.zeros((4, 4))
    expected[0, 0], expected[3, 1], expected[1, 3], expected[2, 2] = 15 / 4, 9 / 4, 5 / 4, 3 / 4
    err = float(np.max(np.abs(d.coefficients - expected)))
    ok = err <= 1e-12
    terms = {k: round(float(np.real(v)), 12) for k, v in d.terms().items()}
    record_criterion(5, ok, f"terms {terms}, max error {err:.1e} (tol 1e-12)")
    assert ok


def test_criterion_6_pauli_circuit():
    rng = np.random.default_rng(20240601)
    thetas = rng.uniform(0, 2 * math.pi, size=20)
    t0 = time.perf_counter()
    fids = [trace_fidelity(build_pauli_exponential_circuit(regression.PAPER_A, th).unitary(),
                           numerics.matrix_exp_i(regression.PAPER_A, th)) for th in thetas]
    elapsed = time.perf_counter() - t0
    ok = min(fids) >= 1 - 1e-10 and elapsed < 1.0
    record_criterion(6, ok, f"min fidelity over 20 angles 1 - {1 - min(fids):.1e}, {elapsed * 1e3:.0f} ms")
    assert ok


def test_criterion_7_sampled_pipeline():
    t0 = time.perf_counter()
    theta = 2 * math.pi / 16
    target = numerics.matrix_exp_i(regression.PAPER_A, theta)
    gs = circuit_to_gene_string(build_pauli_exponential_circuit(regression.PAPER_A, theta), DEFAULT_GATE_SET)
    gs = refine_angles(gs, target)
    fid = trace_fidelity(string_to_unitary(gs), target)
    cfg = HHLConfig(unitary_mode="gene-string", gene_strings=(gs,), shots=100_000, seed=7)
    res = run_hhl(regression.paper_system(), cfg)
    elapsed = time.perf_counter() - t0
    ok = fid >= 0.99 and res.error_2norm <= 0.5 and elapsed < 30
    record_criterion(
        7, ok,
        f"string fidelity {fid:.12f}, 1e5 shots seed 7: rescaled {np.round(res.rescaled_solution, 4).tolist()}, "
        f"error {res.error_2norm:.4f} (bound 0.5; reference 0.1660), {elapsed:.1f} s",
    )
    assert ok


_RX_RESULTS = []
_CNOT_RESULTS = []


@settings(max_examples=5, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2 ** 31 - 1), angle=st.floats(0.05, 2 * math.pi - 0.05))
def _rx_property(seed, angle):
    params = GloaParams(n=5, p=10, max_gates=3, gate_set=("Rx", "Ry", "Rz", "H"),
                        max_iterations=2000, seed=seed)
    res = evolve(gate_matrix("Rx", (angle,)), params)
    again = evolve(gate_matrix("Rx", (angle,)), params)
    _RX_RESULTS.append((res.fidelity, res.iterations, again.history == res.history))
    assert res.fidelity >= 0.999 and res.iterations <= 2000 and again.best == res.best


@settings(max_examples=3, deadline=None, derandomize=True)
@given(seed=st.integers(0, 2 ** 31 - 1))
def _cnot_property(seed):
    params = GloaParams(n=5, p=10, max_gates=4, max_iterations=5000, seed=seed)
    res = evolve(gate_matrix("CNOT"), params)
    again = evolve(gate_matrix("CNOT"), params)
    _CNOT_RESULTS.append((res.fidelity, res.iterations, again.history == res.history))
    assert res.fidelity >= 0.999 and res.iterations <= 5000 and again.best == res.best


def test_criterion_8_gloa_convergence():
    t0 = time.perf_counter()
    failure = None
    try:
        _rx_property()
        _cnot_property()
    except AssertionError as exc:
        failure = exc
    elapsed = time.perf_counter() - t0
    ok = failure is None and elapsed < 60
    rx_it = max((r[1] for r in _RX_RESULTS), default=-1)
    cx_it = max((r[1] for r in _CNOT_RESULTS), default=-1)
    record_criterion(
        8, ok,
        f"Rx: {len(_RX_RESULTS)} seeded runs, worst fidelity {min(r[0] for r in _RX_RESULTS):.6f}, "
        f"max iterations {rx_it}; CNOT: {len(_CNOT_RESULTS)} runs, worst fidelity "
        f"{min((r[0] for r in _CNOT_RESULTS), default=0):.6f}, max iterations {cx_it}; {elapsed:.1f} s",
    )
    assert ok, failure


def test_criterion_9_invariant_suites():
    suites = ["tests/test_properties.py", "tests/test_qsim.py", "tests/test_gloa.py", "tests/test_numerics.py"]
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *suites],
                          capture_output=True, text=True)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0
    record_criterion(9, ok, f"invariant suites: {summary}")
    assert ok, proc.stdout[-2000:]
