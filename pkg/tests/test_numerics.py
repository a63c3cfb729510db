import io
import math

import numpy as np
import pytest
from conftest import random_hermitian

from qlr import numerics
from qlr.regression import PAPER_A


def test_is_hermitian_examples():
    assert numerics.is_hermitian(PAPER_A, 1e-12)
    assert numerics.is_hermitian(np.eye(4), 0.0)
    assert not numerics.is_hermitian([[0, 1], [0, 0]], 1e-12)


def test_is_hermitian_rejects_negative_tol():
    with pytest.raises(ValueError):
        numerics.is_hermitian(np.eye(2), -1.0)


def test_as_matrix_rejects_bad_shapes_and_nan():
    with pytest.raises(numerics.DimensionError):
        numerics.as_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        numerics.as_matrix([[np.nan]])


def test_eigh_fixture_eigenvalues():
    es = numerics.eigh(PAPER_A)
    assert np.allclose(es.eigenvalues, [1, 2, 4, 8], atol=1e-10)


def test_eigh_identity():
    es = numerics.eigh(np.eye(5))
    assert np.allclose(es.eigenvalues, 1.0)
    assert np.allclose(es.eigenvectors.conj().T @ es.eigenvectors, np.eye(5), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
def test_eigh_reconstruction_against_numpy(rng, n):
    a = random_hermitian(rng, n)
    es = numerics.eigh(a)
    assert np.linalg.norm(es.reconstruct() - a) / np.linalg.norm(a) <= 1e-10
    assert np.allclose(es.eigenvalues, np.linalg.eigvalsh(a), atol=1e-10)
    v = es.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert np.all(np.diff(es.eigenvalues) >= 0)


def test_eigh_degenerate_gives_orthonormal_basis():
    a = np.diag([2.0, 2.0, 5.0]).astype(complex)
    u = numerics.matrix_exp_i(PAPER_A[:3, :3], 0.3)  # any unitary
    b = u @ a @ u.conj().T
    es = numerics.eigh(b)
    assert np.allclose(es.eigenvalues, [2, 2, 5], atol=1e-10)
    assert np.allclose(es.eigenvectors.conj().T @ es.eigenvectors, np.eye(3), atol=1e-10)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(numerics.NotHermitianError):
        numerics.eigh([[0, 1], [0, 0]])


def test_matrix_exp_zero_time_is_identity():
    assert np.allclose(numerics.matrix_exp_i(PAPER_A, 0.0), np.eye(4), atol=1e-14)


def test_matrix_exp_acts_on_eigenvector_as_phase():
    # |u1> as printed for eigenvalue 1 (listed last in the worked example)
    u = np.array([-1, 1, 1, 1]) / 2
    U = numerics.matrix_exp_i(PAPER_A, 2 * math.pi / 16)
    assert np.linalg.norm(U @ u - np.exp(1j * 2 * math.pi / 16) * u) <= 1e-10


def test_matrix_exp_unitary_and_group_property(rng):
    U = numerics.matrix_exp_i(PAPER_A, 2 * math.pi)
    assert np.linalg.norm(U @ U.conj().T - np.eye(4)) <= 1e-10
    a = random_hermitian(rng, 8)
    lhs = numerics.matrix_exp_i(a, 0.4) @ numerics.matrix_exp_i(a, 1.1)
    assert np.allclose(lhs, numerics.matrix_exp_i(a, 1.5), atol=1e-9)


def test_matrix_exp_matches_taylor_oracle(rng):
    a = random_hermitian(rng, 4) * 0.3
    x = 1j * a * 0.7
    term = np.eye(4, dtype=complex)
    total = term.copy()
    for k in range(1, 40):
        term = term @ x / k
        total += term
    assert np.allclose(numerics.matrix_exp_i(a, 0.7), total, atol=1e-12)


def test_condition_number():
    assert numerics.condition_number(PAPER_A) == pytest.approx(8.0, abs=1e-10)
    assert numerics.condition_number(np.eye(3)) == pytest.approx(1.0)
    with pytest.raises(numerics.SingularMatrixError, match="undefined condition number"):
        numerics.condition_number(np.diag([1.0, 0.0]))


def test_hermitian_embed_examples(rng):
    a = np.array([[0, 1], [0, 0]])
    expected = np.array([[0, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 0]])
    e = numerics.hermitian_embed(a)
    assert np.array_equal(e, expected)
    assert numerics.is_hermitian(e)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    e = numerics.hermitian_embed(m)
    assert np.array_equal(e[3:, :3], m)
    assert np.array_equal(e[:3, 3:], m.conj().T)


def test_hermitian_embed_spectrum_is_plus_minus_singular_values(rng):
    h = random_hermitian(rng, 4)
    ev = numerics.eigh(numerics.hermitian_embed(h)).eigenvalues
    sv = np.sqrt(np.abs(np.linalg.eigvalsh(h.conj().T @ h)))
    assert np.allclose(np.sort(ev), np.sort(np.concatenate([sv, -sv])), atol=1e-10)


def test_pauli_decomposition_of_fixture():
    terms = numerics.pauli_decompose_2q(PAPER_A).terms()
    assert set(terms) == {"II", "ZX", "XZ", "YY"}
    assert terms["II"] == pytest.approx(15 / 4, abs=1e-12)
    assert terms["ZX"] == pytest.approx(9 / 4, abs=1e-12)
    assert terms["XZ"] == pytest.approx(5 / 4, abs=1e-12)
    assert terms["YY"] == pytest.approx(3 / 4, abs=1e-12)


def test_pauli_decomposition_identity_and_reconstruction(rng):
    d = numerics.pauli_decompose_2q(np.eye(4))
    assert d.terms() == {"II": 1.0}
    h = random_hermitian(rng, 4)
    d = numerics.pauli_decompose_2q(h)
    assert np.max(np.abs(d.coefficients.imag)) <= 1e-10
    assert np.allclose(d.reconstruct(), h, atol=1e-10)
    assert 4 * np.sum(np.abs(d.coefficients) ** 2) == pytest.approx(np.linalg.norm(h) ** 2, rel=1e-9)


def test_pauli_decomposition_wrong_dimension():
    with pytest.raises(numerics.DimensionError):
        numerics.pauli_decompose_2q(np.eye(2))


def test_hilbert_schmidt_distance_examples():
    u = numerics.matrix_exp_i(PAPER_A, 0.2)
    assert numerics.hilbert_schmidt_distance(u, u) == 0.0
    assert numerics.hilbert_schmidt_distance(np.eye(2), np.diag([1, -1])) == pytest.approx(2.0)
    assert numerics.hilbert_schmidt_distance(np.eye(2), 1j * np.eye(2)) == pytest.approx(2.0)
    with pytest.raises(numerics.DimensionError):
        numerics.hilbert_schmidt_distance(np.eye(2), np.eye(4))


def test_matrix_json_round_trip(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    buf = io.StringIO()
    numerics.dump_matrix(m, buf)
    buf.seek(0)
    assert np.array_equal(numerics.load_matrix(buf), m)


def test_matrix_json_rejects_bad_entry_count():
    with pytest.raises(numerics.DimensionError):
        numerics.matrix_from_json({"dim": 2, "entries": [[1, 0]] * 3})
    with pytest.raises(ValueError):
        numerics.matrix_from_json({"entries": []})
