"""Dichte komplexe lineare Algebra für reine Zustände auf bis zu sechs Qubits.

Konvention für Tensorprodukte: das erste Label/Qubit 0 ist der höchstwertige
Faktor (``np.kron(P0, np.kron(P1, ...))``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from utils.errors import ConsistencyError, DimensionMismatch, OperatorValidation
from utils.settings import get_settings, tolerances

logger = logging.getLogger(__name__)

PAULI_MATRICES: dict[str, np.ndarray] = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frozen(matrix: np.ndarray) -> np.ndarray:
    out = np.array(matrix, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def _qubits_for_dim(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise DimensionMismatch(f"Dimension {dim} ist keine Zweierpotenz >= 2")
    q = dim.bit_length() - 1
    if q > get_settings().max_qubits:
        raise DimensionMismatch(f"{q} Qubits überschreiten das Limit von {get_settings().max_qubits}")
    return q


def _square(matrix: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{what}: quadratische Matrix erwartet, erhalten {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normierter Zustandsvektor der Dimension 2^q."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _qubits_for_dim(amps.shape[0])
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > tolerances().norm:
            raise ConsistencyError(f"Zustand nicht normiert: |ψ| = {norm!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes: Iterable[complex]) -> "StateVector":
        amps = np.asarray(list(amplitudes), dtype=complex)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise ConsistencyError("Nullvektor ist kein Zustand")
        return cls(amps / norm)

    @classmethod
    def zero(cls, q: int) -> "StateVector":
        return cls.basis(q, 0)

    @classmethod
    def basis(cls, q: int, index: int) -> "StateVector":
        amps = np.zeros(2**q, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def plus(cls, q: int) -> "StateVector":
        return cls(np.full(2**q, 2 ** (-q / 2), dtype=complex))

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def q(self) -> int:
        return self.dim.bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Observable oder Generator: dichte Matrix mit A = A†."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _square(self.matrix, "HermitianOperator")
        _qubits_for_dim(m.shape[0])
        deviation = float(np.max(np.abs(m - m.conj().T)))
        if deviation >= tolerances().hermitian:
            raise OperatorValidation(f"Matrix nicht hermitesch (max |A − A†| = {deviation:.3e})")
        # exakt symmetrisieren, damit Rundungsreste nicht in Erwartungswerte laufen
        object.__setattr__(self, "matrix", _frozen((m + m.conj().T) / 2))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def q(self) -> int:
        return self.dim.bit_length() - 1

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + other.matrix)

    def scaled(self, factor: float) -> "HermitianOperator":
        return HermitianOperator(float(factor) * self.matrix)

    def shifted(self, offset: float) -> "HermitianOperator":
        return HermitianOperator(self.matrix - float(offset) * np.eye(self.dim))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _square(self.matrix, "UnitaryMatrix")
        _qubits_for_dim(m.shape[0])
        deviation = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if deviation >= tolerances().unitary:
            raise OperatorValidation(f"Matrix nicht unitär (max |U†U − 1| = {deviation:.3e})")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix.conj().T)

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        return UnitaryMatrix(self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Verschmolzene Eigenwerte (absteigend) mit zugehörigen Projektoren."""

    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.eigenvalues) != len(self.projectors) or not self.eigenvalues:
            raise ConsistencyError("Spektrum: Eigenwerte und Projektoren passen nicht zusammen")
        tol = tolerances().projector
        dim = self.projectors[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for k, p in enumerate(self.projectors):
            if np.max(np.abs(p @ p - p)) >= tol:
                raise ConsistencyError(f"Projektor {k} nicht idempotent")
            for j in range(k):
                if np.max(np.abs(p @ self.projectors[j])) >= tol:
                    raise ConsistencyError(f"Projektoren {j} und {k} nicht orthogonal")
            total += p
        if np.max(np.abs(total - np.eye(dim))) >= tol:
            raise ConsistencyError("Projektoren summieren sich nicht zur Identität")
        object.__setattr__(self, "eigenvalues", tuple(float(v) for v in self.eigenvalues))
        object.__setattr__(self, "projectors", tuple(_frozen(p) for p in self.projectors))

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in zip(self.eigenvalues, self.projectors))

    def probabilities(self, state: StateVector) -> np.ndarray:
        """Born-Wahrscheinlichkeiten p_k = ⟨ψ|P_k|ψ⟩ (geklippt und renormiert)."""
        psi = state.amplitudes
        raw = np.array([np.vdot(psi, p @ psi).real for p in self.projectors])
        total = float(raw.sum())
        if abs(total - 1.0) >= tolerances().probability_sum:
            raise ConsistencyError(f"Wahrscheinlichkeitssumme {total!r} weicht von 1 ab")
        clipped = np.clip(raw, 0.0, 1.0)
        return clipped / clipped.sum()


def identity(q: int) -> HermitianOperator:
    return HermitianOperator(np.eye(2**q, dtype=complex))


def pauli_string(labels: Sequence[str]) -> HermitianOperator:
    """Tensorprodukt der Einzel-Qubit-Paulis, z. B. ``["X", "I"]`` oder ``"XI"``."""
    if len(labels) == 0:
        raise OperatorValidation("Pauli-String ohne Labels")
    matrix = np.array([[1.0]], dtype=complex)
    for label in labels:
        key = str(label).strip().upper()
        if key not in PAULI_MATRICES:
            raise OperatorValidation(f"Unbekanntes Pauli-Label {label!r}")
        matrix = np.kron(matrix, PAULI_MATRICES[key])
    return HermitianOperator(matrix)


def embed_pauli(label: str, qubit: int, q: int) -> HermitianOperator:
    if not 0 <= qubit < q:
        raise DimensionMismatch(f"Qubit {qubit} außerhalb von 0..{q - 1}")
    labels = ["I"] * q
    labels[qubit] = label
    return pauli_string(labels)


def pauli_sum(terms: Iterable[tuple[float, Sequence[str]]]) -> HermitianOperator:
    """Reell gewichtete Summe von Pauli-Strings gleicher Länge."""
    total: np.ndarray | None = None
    for coeff, labels in terms:
        term = float(coeff) * pauli_string(labels).matrix
        if total is not None and total.shape != term.shape:
            raise DimensionMismatch("Pauli-Strings unterschiedlicher Länge in einer Summe")
        total = term if total is None else total + term
    if total is None:
        raise OperatorValidation("Leere Pauli-Summe")
    return HermitianOperator(total)


def _check_dims(dim_a: int, dim_b: int, what: str) -> None:
    if dim_a != dim_b:
        raise DimensionMismatch(f"{what}: Dimension {dim_a} passt nicht zu {dim_b}")


def expectation(state: StateVector, obs: HermitianOperator) -> float:
    _check_dims(state.dim, obs.dim, "expectation")
    psi = state.amplitudes
    value = np.vdot(psi, obs.matrix @ psi)
    if abs(value.imag) >= tolerances().imaginary * max(1.0, abs(value.real)):
        raise ConsistencyError(f"Erwartungswert nicht reell (Im = {value.imag:.3e})")
    return float(value.real)


def eigendecompose(obs: HermitianOperator, degeneracy_tol: float | None = None) -> Spectrum:
    """Spektralzerlegung mit Verschmelzung naher Eigenwerte (relativ zur Spektralnorm)."""
    tol = tolerances().degeneracy if degeneracy_tol is None else float(degeneracy_tol)
    try:
        values, vectors = np.linalg.eigh(obs.matrix)
    except np.linalg.LinAlgError as e:
        logger.exception("eigh fehlgeschlagen (dim=%s)", obs.dim)
        raise ConsistencyError(f"Eigenzerlegung fehlgeschlagen: {e}") from e

    scale = max(1.0, float(np.max(np.abs(values))))
    threshold = tol * scale
    order = np.argsort(values)[::-1]
    groups: list[list[int]] = []
    for idx in order:
        if groups and abs(values[groups[-1][0]] - values[idx]) <= threshold:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])

    eigenvalues = [float(np.mean(values[g])) for g in groups]
    projectors = [vectors[:, g] @ vectors[:, g].conj().T for g in groups]
    spectrum = Spectrum(tuple(eigenvalues), tuple(projectors))
    deviation = float(np.max(np.abs(spectrum.reconstruct() - obs.matrix)))
    limit = tolerances().projector * scale
    if deviation >= limit + threshold:
        raise ConsistencyError(f"Rekonstruktion Σ λP weicht um {deviation:.3e} ab")
    if deviation >= limit:
        # nur bei verschmolzenen, fast entarteten Eigenwerten
        logger.warning("Rekonstruktion Σ λP weicht um %.3e ab (Verschmelzung)", deviation)
    return spectrum


def apply_unitary(state: StateVector, u: UnitaryMatrix) -> StateVector:
    _check_dims(state.dim, u.dim, "apply_unitary")
    out = u.matrix @ state.amplitudes
    norm = float(np.linalg.norm(out))
    if abs(norm - 1.0) > tolerances().norm:
        raise ConsistencyError(f"Norm nach Unitär-Anwendung {norm!r}")
    return StateVector(out / norm)
