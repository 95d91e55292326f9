"""Seedbare Zufallsschaltungen für Eigenschaftstests und den Ensemble-Modus von ``gradcheck``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from services.costfn import Fixed, Param, ParameterizedCircuit
from services.rgates import gate_matrix, make_r_gate
from services.statevector import StateVector, pauli_string, pauli_sum

R_CHOICES = (0.5, 1.0, 1.3)
_LABELS = "IXYZ"


@dataclass(frozen=True, eq=False)
class EnsembleMember:
    circuit_id: str
    circuit: ParameterizedCircuit
    theta: np.ndarray


def random_pauli_label(rng: np.random.Generator, q: int, allow_identity: bool = True) -> str:
    while True:
        label = "".join(_LABELS[k] for k in rng.integers(0, 4, size=q))
        if allow_identity or set(label) != {"I"}:
            return label


def random_state(rng: np.random.Generator, q: int) -> StateVector:
    """Erste Spalte einer Haar-zufälligen Unitären."""
    u = unitary_group.rvs(2**q, random_state=rng)
    return StateVector.from_amplitudes(u[:, 0])


def random_circuit(
    rng: np.random.Generator,
    q: int,
    n_params: int,
    r_choices: Sequence[float] = R_CHOICES,
    max_terms: int = 3,
    normalize: bool = False,
    name: str = "random",
) -> ParameterizedCircuit:
    """Je Parameter ein r-Gate r·P (P zufälliger Pauli-String ≠ I), dazwischen feste
    Pauli-Rotationen. ``normalize`` skaliert die Observable auf Spektralnorm ≤ 1."""
    ops: list[Fixed | Param] = []
    for index in range(n_params):
        r = float(rng.choice(np.asarray(r_choices, dtype=float)))
        generator = pauli_string(random_pauli_label(rng, q, allow_identity=False)).scaled(r)
        ops.append(Param(make_r_gate(generator), index, f"p{index}"))
        if q > 1 or rng.random() < 0.5:
            mixer = make_r_gate(pauli_string(random_pauli_label(rng, q, allow_identity=False)))
            ops.append(Fixed(gate_matrix(mixer, float(rng.uniform(-math.pi, math.pi))), "mix"))

    n_terms = int(rng.integers(1, max_terms + 1))
    coeffs = rng.uniform(-1.0, 1.0, size=n_terms)
    if normalize:
        coeffs = coeffs / max(1.0, float(np.sum(np.abs(coeffs))))
    observable = pauli_sum((float(c), random_pauli_label(rng, q)) for c in coeffs)
    return ParameterizedCircuit(
        q=q,
        ops=tuple(ops),
        n_params=n_params,
        initial_state=random_state(rng, q),
        observable=observable,
        name=name,
    )


def random_theta(rng: np.random.Generator, circuit: ParameterizedCircuit) -> np.ndarray:
    bounds = [math.pi / circuit.r_of(i) for i in range(circuit.n_params)]
    return np.array([rng.uniform(-b, b) for b in bounds])


def ensemble(
    seed: int,
    count: int,
    qubits: tuple[int, int] = (1, 4),
    max_params: int = 3,
    r_choices: Sequence[float] = R_CHOICES,
    normalize: bool = False,
    min_params: int = 1,
) -> list[EnsembleMember]:
    """``count`` Schaltungen mit 1–4 Qubits und zufälligem θ; deterministisch pro ``seed``."""
    rng = np.random.default_rng(seed)
    members = []
    for k in range(count):
        q = int(rng.integers(qubits[0], qubits[1] + 1))
        n = int(rng.integers(min_params, max_params + 1))
        circuit = random_circuit(rng, q, n, r_choices=r_choices, normalize=normalize, name=f"rand-{seed}-{k}")
        members.append(EnsembleMember(circuit_id=circuit.name, circuit=circuit, theta=random_theta(rng, circuit)))
    return members
