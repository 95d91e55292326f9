"""Gemeinsame Fixtures: gebündelte Schaltungen, kleine Zufallsensembles, isolierte Einstellungen."""

from __future__ import annotations

from pathlib import Path

import pytest

from services.circuit_spec import load_circuit
from services.costfn import ParameterizedCircuit, single_gate_circuit
from services.ensembles import ensemble
from services.statevector import StateVector, pauli_string
from utils.settings import LabSettings, configure_lab

REPO_ROOT = Path(__file__).resolve().parent.parent
CIRCUITS_DIR = REPO_ROOT / "circuits"
CONFIGS_DIR = REPO_ROOT / "configs"


@pytest.fixture(autouse=True)
def _lab_settings(tmp_path):
    configure_lab(LabSettings(output_dir=tmp_path / "results"))
    yield
    configure_lab(LabSettings())


@pytest.fixture
def cos_t_circuit() -> ParameterizedCircuit:
    """Z/2 auf |+⟩ mit Observable X: f(t) = cos t, r = 1/2."""
    return load_circuit(CIRCUITS_DIR / "cos_t.json")


@pytest.fixture
def sin_t_circuit() -> ParameterizedCircuit:
    return single_gate_circuit(pauli_string("Z").scaled(0.5), StateVector.plus(1), pauli_string("Y"), "sin-t")


@pytest.fixture
def cos_2t_circuit() -> ParameterizedCircuit:
    """Z auf |+⟩ mit Observable X: f(t) = cos 2t, r = 1."""
    return single_gate_circuit(pauli_string("Z"), StateVector.plus(1), pauli_string("X"), "cos-2t")


@pytest.fixture
def eigenstate_circuit() -> ParameterizedCircuit:
    """Z-Gate auf |0⟩ mit Observable Z: σ₁² ≡ 0."""
    return single_gate_circuit(pauli_string("Z"), StateVector.zero(1), pauli_string("Z"), "eigen")


@pytest.fixture
def product_circuit() -> ParameterizedCircuit:
    """f(t1, t2) = cos t1 · cos t2."""
    return load_circuit(CIRCUITS_DIR / "product_2q.json")


@pytest.fixture
def entangling_circuit() -> ParameterizedCircuit:
    return load_circuit(CIRCUITS_DIR / "entangling_2q.json")


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS_DIR


@pytest.fixture
def circuits_dir() -> Path:
    return CIRCUITS_DIR


@pytest.fixture(scope="session")
def random_ensemble():
    return ensemble(seed=2022, count=40)
