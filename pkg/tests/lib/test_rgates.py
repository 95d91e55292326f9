"""Tests für services.rgates."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.linalg import expm

from services.costfn import evaluate, single_gate_circuit
from services.rgates import RGate, gate_matrix, make_r_gate
from services.statevector import HermitianOperator, StateVector, pauli_string, pauli_sum
from utils.errors import RGateValidation

pytestmark = pytest.mark.lib


def test_make_r_gate_pauli_z():
    gate = make_r_gate(pauli_string("Z"))
    assert gate.r == pytest.approx(1.0)
    assert gate.was_centered is False


def test_make_r_gate_half_z():
    assert make_r_gate(pauli_string("Z").scaled(0.5)).r == pytest.approx(0.5)


def test_make_r_gate_centers_diag_3_1():
    gate = make_r_gate(HermitianOperator(np.diag([3.0, 1.0])))
    assert gate.r == pytest.approx(1.0)
    assert gate.was_centered is True
    assert gate.center == pytest.approx(2.0)
    assert np.allclose(gate.generator.matrix, np.diag([1.0, -1.0]))


@pytest.mark.parametrize("delta", [3e-10, 8e-10])
def test_make_r_gate_removes_tiny_center(delta):
    gate = make_r_gate(HermitianOperator(np.diag([1.0 + delta, -1.0 + delta])))
    assert gate.r == pytest.approx(1.0, abs=1e-12)
    assert gate.was_centered is False
    assert gate.center == pytest.approx(delta, rel=1e-5)
    assert np.allclose(gate.generator.matrix, np.diag([1.0, -1.0]), atol=1e-14)


def test_make_r_gate_rejects_identity_and_three_eigenvalues():
    with pytest.raises(RGateValidation, match="1 verschiedene"):
        make_r_gate(pauli_string("II"))
    with pytest.raises(RGateValidation, match="3 verschiedene"):
        make_r_gate(pauli_sum([(1.0, "ZI"), (1.0, "IZ")]))


def test_rgate_rejects_non_positive_r():
    with pytest.raises(RGateValidation):
        RGate(generator=pauli_string("Z"), r=0.0)


def test_gate_matrix_values():
    z = make_r_gate(pauli_string("Z"))
    assert np.allclose(gate_matrix(z, 0.0).matrix, np.eye(2))
    assert np.allclose(gate_matrix(z, math.pi / 2).matrix, np.diag([-1j, 1j]))
    x = make_r_gate(pauli_string("X"))
    assert np.allclose(gate_matrix(x, math.pi).matrix, -np.eye(2))


@pytest.mark.parametrize("labels,scale", [("Z", 0.5), ("XY", 1.0), ("ZZI", 1.3), ("YXZ", 0.7)])
def test_gate_matrix_matches_expm(labels, scale):
    gate = make_r_gate(pauli_string(labels).scaled(scale))
    for theta in (-2.1, 0.3, 1.7, 9.0):
        reference = expm(-1j * theta * gate.generator.matrix)
        assert np.max(np.abs(gate_matrix(gate, theta).matrix - reference)) < 1e-10


def test_gate_matrix_group_law_and_inverse():
    gate = make_r_gate(pauli_string("XZ").scaled(1.3))
    a, b = 0.4, -1.9
    product = (gate_matrix(gate, a) @ gate_matrix(gate, b)).matrix
    assert np.max(np.abs(product - gate_matrix(gate, a + b).matrix)) < 1e-10
    assert np.max(np.abs(gate_matrix(gate, a).dagger().matrix - gate_matrix(gate, -a).matrix)) < 1e-12


def test_expectation_period_is_pi_over_r():
    gate_gen = pauli_string("Y").scaled(1.3)
    circuit = single_gate_circuit(gate_gen, StateVector.zero(1), pauli_string("Z"))
    period = make_r_gate(gate_gen).period
    for t in (0.1, 0.9, 2.5):
        assert evaluate(circuit, [t]) == pytest.approx(evaluate(circuit, [t + period]), abs=1e-12)


def test_centering_does_not_change_expectation_values():
    raw = HermitianOperator(np.diag([3.0, 1.0]))
    obs = pauli_string("X")
    state = StateVector.plus(1)
    centered = single_gate_circuit(raw, state, obs)
    for t in (0.0, 0.4, 1.3, -2.2):
        u = expm(-1j * t * raw.matrix)
        psi = u @ state.amplitudes
        direct = float(np.vdot(psi, obs.matrix @ psi).real)
        assert evaluate(centered, [t]) == pytest.approx(direct, abs=1e-10)
