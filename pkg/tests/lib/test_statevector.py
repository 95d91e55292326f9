"""Tests für services.statevector (Zustände, Observablen, Spektren)."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.stats import unitary_group

from services.statevector import (
    HermitianOperator,
    StateVector,
    UnitaryMatrix,
    apply_unitary,
    eigendecompose,
    embed_pauli,
    expectation,
    identity,
    pauli_string,
    pauli_sum,
)
from utils.errors import ConsistencyError, DimensionMismatch, OperatorValidation

pytestmark = pytest.mark.lib


def _random_hermitian(rng: np.random.Generator, dim: int) -> HermitianOperator:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator((m + m.conj().T) / 2)


def test_pauli_z_is_diagonal():
    assert np.allclose(pauli_string(["Z"]).matrix, np.diag([1, -1]))


def test_pauli_string_tensor_product_spectrum():
    xi = pauli_string(["X", "I"])
    assert xi.dim == 4
    assert np.allclose(np.linalg.eigvalsh(xi.matrix), [-1, -1, 1, 1])
    assert np.allclose(pauli_string("XI").matrix, xi.matrix)


@pytest.mark.parametrize("labels", [["Y"], ["X", "Z"], ["Y", "Y", "I"], list("XYZIX")])
def test_pauli_strings_square_to_identity(labels):
    p = pauli_string(labels).matrix
    assert np.max(np.abs(p @ p - np.eye(p.shape[0]))) < 1e-12


def test_pauli_string_rejects_empty_and_unknown_labels():
    with pytest.raises(OperatorValidation):
        pauli_string([])
    with pytest.raises(OperatorValidation):
        pauli_string(["Q"])


def test_embed_pauli_places_label_on_qubit():
    assert np.allclose(embed_pauli("Z", 1, 2).matrix, pauli_string("IZ").matrix)
    with pytest.raises(DimensionMismatch):
        embed_pauli("Z", 2, 2)


def test_pauli_sum_rejects_mixed_lengths():
    with pytest.raises(DimensionMismatch):
        pauli_sum([(1.0, "X"), (1.0, "XX")])


def test_expectation_values():
    plus, zero = StateVector.plus(1), StateVector.zero(1)
    assert expectation(plus, pauli_string("X")) == pytest.approx(1.0, abs=1e-15)
    assert expectation(zero, pauli_string("X")) == pytest.approx(0.0, abs=1e-15)
    assert expectation(zero, pauli_string("Z")) == pytest.approx(1.0, abs=1e-15)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        expectation(StateVector.zero(2), pauli_string("Z"))


def test_expectation_is_real_for_random_hermitian():
    rng = np.random.default_rng(1)
    for _ in range(20):
        obs = _random_hermitian(rng, 8)
        state = StateVector.from_amplitudes(unitary_group.rvs(8, random_state=rng)[:, 0])
        value = expectation(state, obs)
        assert isinstance(value, float)


def test_state_vector_requires_unit_norm_and_power_of_two():
    with pytest.raises(ConsistencyError):
        StateVector(np.array([1.0, 1.0], dtype=complex))
    with pytest.raises(DimensionMismatch):
        StateVector(np.array([1.0, 0.0, 0.0], dtype=complex))


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(OperatorValidation):
        HermitianOperator(np.array([[0, 1], [0, 0]], dtype=complex))


def test_unitary_matrix_rejects_non_unitary():
    with pytest.raises(OperatorValidation):
        UnitaryMatrix(np.array([[1, 1], [0, 1]], dtype=complex))


def test_eigendecompose_z():
    spectrum = eigendecompose(pauli_string("Z"))
    assert spectrum.eigenvalues == pytest.approx((1.0, -1.0))
    assert np.allclose(spectrum.projectors[0], np.diag([1, 0]))
    assert np.allclose(spectrum.projectors[1], np.diag([0, 1]))


def test_eigendecompose_identity_merges_everything():
    spectrum = eigendecompose(identity(2))
    assert spectrum.eigenvalues == pytest.approx((1.0,))
    assert np.allclose(spectrum.projectors[0], np.eye(4))


def test_eigendecompose_x_reconstructs():
    x = pauli_string("X")
    spectrum = eigendecompose(x)
    assert spectrum.eigenvalues == pytest.approx((1.0, -1.0))
    assert np.max(np.abs(spectrum.reconstruct() - x.matrix)) < 1e-10


@pytest.mark.parametrize("dim", [2, 4, 16, 64])
def test_eigendecompose_reconstructs_random_hermitian(dim):
    rng = np.random.default_rng(dim)
    obs = _random_hermitian(rng, dim)
    spectrum = eigendecompose(obs)
    assert np.max(np.abs(spectrum.reconstruct() - obs.matrix)) < 1e-10
    assert list(spectrum.eigenvalues) == sorted(spectrum.eigenvalues, reverse=True)


def test_eigendecompose_merges_degenerate_pauli_sum():
    spectrum = eigendecompose(pauli_sum([(1.0, "ZI"), (1.0, "IZ")]))
    assert spectrum.eigenvalues == pytest.approx((2.0, 0.0, -2.0))
    assert np.trace(spectrum.projectors[1]).real == pytest.approx(2.0)


def test_apply_unitary_values():
    zero = StateVector.zero(1)
    x = UnitaryMatrix(pauli_string("X").matrix)
    same = apply_unitary(zero, UnitaryMatrix(np.eye(2)))
    assert np.allclose(same.amplitudes, zero.amplitudes)
    one = apply_unitary(zero, x)
    assert np.allclose(one.amplitudes, [0, 1])
    back = apply_unitary(one, x)
    assert np.allclose(back.amplitudes, [1, 0])


def test_apply_unitary_preserves_norm():
    rng = np.random.default_rng(7)
    state = StateVector.from_amplitudes(unitary_group.rvs(16, random_state=rng)[:, 0])
    for _ in range(10):
        state = apply_unitary(state, UnitaryMatrix(unitary_group.rvs(16, random_state=rng)))
        assert abs(state.norm() - 1.0) < 1e-12


def test_apply_unitary_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_unitary(StateVector.zero(2), UnitaryMatrix(np.eye(2)))


def test_probabilities_sum_to_one():
    spectrum = eigendecompose(pauli_string("X"))
    probs = spectrum.probabilities(StateVector.zero(1))
    assert probs == pytest.approx([0.5, 0.5])
    assert probs.sum() == pytest.approx(1.0)
