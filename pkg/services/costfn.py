"""Parametrisierte Schaltungen, Kostenfunktion F(θ), Einkomponenten-Funktionen und Shot-Schätzer.

Konvention: ``Param(G, i)`` wendet e^{−iθ_i G} auf den Ket an. Eine Schaltung mit
genau einem Gate liefert damit f(θ) = ⟨ψ|e^{iθG} A e^{−iθG}|ψ⟩. Die Schreibweise
⟨ψ|U A U†|ψ⟩ geht daraus durch θ ↦ −θ hervor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from services.rgates import RGate, gate_matrix, make_r_gate
from services.statevector import (
    HermitianOperator,
    Spectrum,
    StateVector,
    UnitaryMatrix,
    apply_unitary,
    eigendecompose,
    expectation,
)
from utils.errors import ConsistencyError, DimensionMismatch, PreconditionViolation
from utils.rng import shot_uniforms
from utils.settings import tolerances

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Fixed:
    unitary: UnitaryMatrix
    label: str = "fixed"


@dataclass(frozen=True, eq=False)
class Param:
    gate: RGate
    index: int
    label: str = "param"


CircuitOp = Union[Fixed, Param]


@dataclass(frozen=True, eq=False)
class ParameterizedCircuit:
    q: int
    ops: tuple[CircuitOp, ...]
    n_params: int
    initial_state: StateVector
    observable: HermitianOperator
    name: str = "circuit"

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        dim = 2**self.q
        if self.initial_state.dim != dim or self.observable.dim != dim:
            raise DimensionMismatch(f"{self.name}: Zustand/Observable passen nicht zu {self.q} Qubits")
        seen: set[int] = set()
        for k, op in enumerate(self.ops):
            if isinstance(op, Param):
                if op.gate.dim != dim:
                    raise DimensionMismatch(f"{self.name}: Gate {k} hat Dimension {op.gate.dim}")
                if not 0 <= op.index < self.n_params:
                    raise DimensionMismatch(f"{self.name}: Parameterindex {op.index} außerhalb 0..{self.n_params - 1}")
                seen.add(op.index)
            elif isinstance(op, Fixed):
                if op.unitary.dim != dim:
                    raise DimensionMismatch(f"{self.name}: festes Gate {k} hat Dimension {op.unitary.dim}")
            else:
                raise TypeError(f"Unbekanntes Schaltungselement {op!r}")
        missing = sorted(set(range(self.n_params)) - seen)
        if missing:
            raise DimensionMismatch(f"{self.name}: Parameterindizes ohne Gate: {missing}")

    @cached_property
    def spectrum(self) -> Spectrum:
        return eigendecompose(self.observable)

    @cached_property
    def observable_squared(self) -> HermitianOperator:
        m = self.observable.matrix
        return HermitianOperator(m @ m)

    def gates_for(self, index: int) -> list[RGate]:
        return [op.gate for op in self.ops if isinstance(op, Param) and op.index == index]

    def r_of(self, index: int) -> float:
        gates = self.gates_for(index)
        if not gates:
            raise DimensionMismatch(f"{self.name}: kein Gate für Parameter {index}")
        r = gates[0].r
        if any(abs(g.r - r) > tolerances().r_gate for g in gates[1:]):
            raise PreconditionViolation(f"{self.name}: Parameter {index} steuert Gates mit verschiedenem r")
        return r


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    sample_variance: float
    shots: int
    seed: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise PreconditionViolation("shots muss >= 1 sein")
        if self.sample_variance < 0:
            raise ConsistencyError(f"negative Stichprobenvarianz {self.sample_variance!r}")


def _as_point(circuit: ParameterizedCircuit, theta: Sequence[float] | np.ndarray) -> np.ndarray:
    point = np.asarray(theta, dtype=float).reshape(-1)
    if point.shape[0] != circuit.n_params:
        raise DimensionMismatch(
            f"{circuit.name}: θ hat Länge {point.shape[0]}, erwartet {circuit.n_params}"
        )
    return point


def prepare_state(circuit: ParameterizedCircuit, theta: Sequence[float] | np.ndarray) -> StateVector:
    point = _as_point(circuit, theta)
    state = circuit.initial_state
    for op in circuit.ops:
        if isinstance(op, Param):
            state = apply_unitary(state, gate_matrix(op.gate, point[op.index]))
        else:
            state = apply_unitary(state, op.unitary)
    return state


def evaluate(circuit: ParameterizedCircuit, theta: Sequence[float] | np.ndarray) -> float:
    return expectation(prepare_state(circuit, theta), circuit.observable)


@dataclass(frozen=True, eq=False)
class SingleComponentFunction:
    """t ↦ F(θ_1, …, θ_{i−1}, t, θ_{i+1}, …, θ_n) bei festem Basispunkt."""

    circuit: ParameterizedCircuit
    base_point: tuple[float, ...]
    component: int
    r: float = field(default=0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_point", tuple(float(x) for x in self.base_point))
        if len(self.base_point) != self.circuit.n_params:
            raise DimensionMismatch("Basispunkt hat falsche Länge")
        if not 0 <= self.component < self.circuit.n_params:
            raise DimensionMismatch(f"Komponente {self.component} außerhalb 0..{self.circuit.n_params - 1}")
        object.__setattr__(self, "r", self.circuit.r_of(self.component))

    @property
    def base_value(self) -> float:
        return self.base_point[self.component]

    def point(self, t: float) -> np.ndarray:
        p = np.array(self.base_point, dtype=float)
        p[self.component] = float(t)
        return p

    def state(self, t: float) -> StateVector:
        return prepare_state(self.circuit, self.point(t))

    def __call__(self, t: float) -> float:
        return evaluate(self.circuit, self.point(t))


def restrict(circuit: ParameterizedCircuit, theta: Sequence[float] | np.ndarray, i: int) -> SingleComponentFunction:
    point = _as_point(circuit, theta)
    return SingleComponentFunction(circuit=circuit, base_point=tuple(point), component=i)


Source = Union[SingleComponentFunction, ParameterizedCircuit]


def _resolve(source: Source, theta: float | Sequence[float] | None) -> tuple[ParameterizedCircuit, np.ndarray]:
    if isinstance(source, SingleComponentFunction):
        t = source.base_value if theta is None else float(theta)  # type: ignore[arg-type]
        return source.circuit, source.point(t)
    if theta is None:
        raise PreconditionViolation("Für eine Schaltung muss θ angegeben werden")
    return source, _as_point(source, theta)  # type: ignore[arg-type]


def draw_shots(
    source: Source,
    n: int,
    seed: int,
    theta: float | Sequence[float] | None = None,
    stream: int = 0,
) -> np.ndarray:
    """``n`` Einzelmessungen (Eigenwerte der Observable) per inverser CDF."""
    if n < 1:
        raise PreconditionViolation(f"Shot-Anzahl muss >= 1 sein, erhalten {n}")
    circuit, point = _resolve(source, theta)
    probs = circuit.spectrum.probabilities(prepare_state(circuit, point))
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, shot_uniforms(seed, stream, n), side="right")
    idx = np.minimum(idx, len(cdf) - 1)
    return np.asarray(circuit.spectrum.eigenvalues, dtype=float)[idx]


def sample_single_shot(
    source: Source, rng_seed: int, theta: float | Sequence[float] | None = None, stream: int = 0
) -> float:
    return float(draw_shots(source, 1, rng_seed, theta=theta, stream=stream)[0])


def summarize_shots(samples: np.ndarray, seed: int) -> EstimatorResult:
    n = int(samples.shape[0])
    variance = float(np.var(samples, ddof=1)) if n > 1 else 0.0
    return EstimatorResult(mean=float(np.mean(samples)), sample_variance=variance, shots=n, seed=seed)


def sample_n_shots(
    source: Source, n: int, rng_seed: int, theta: float | Sequence[float] | None = None, stream: int = 0
) -> EstimatorResult:
    return summarize_shots(draw_shots(source, n, rng_seed, theta=theta, stream=stream), rng_seed)


def one_shot_variance(source: Source, t: float | Sequence[float] | None = None) -> float:
    """σ₁² = ⟨A²⟩ − ⟨A⟩² im bei ``t`` präparierten Zustand."""
    circuit, point = _resolve(source, t)
    state = prepare_state(circuit, point)
    mean = expectation(state, circuit.observable)
    value = expectation(state, circuit.observable_squared) - mean**2
    if value < -tolerances().negative_variance * max(1.0, mean**2):
        raise ConsistencyError(f"negative Einzelshot-Varianz {value!r}")
    return max(0.0, value)


def single_gate_circuit(
    generator: HermitianOperator,
    state: StateVector,
    observable: HermitianOperator,
    name: str = "single-gate",
) -> ParameterizedCircuit:
    """f(θ) = ⟨ψ|e^{iθG} A e^{−iθG}|ψ⟩ als Schaltung mit genau einem r-Gate."""
    return ParameterizedCircuit(
        q=state.q,
        ops=(Param(make_r_gate(generator), 0, "G"),),
        n_params=1,
        initial_state=state,
        observable=observable,
        name=name,
    )
