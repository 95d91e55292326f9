"""Zwei-Parameter-Auswertungen, 2×2-Hesse-Matrix über verschachtelte cPSR und
Residuenbericht der Linearkombination aus vier Hesse-Einträgen."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from services.costfn import ParameterizedCircuit, SingleComponentFunction, evaluate, restrict
from services.gradrules import second_derivative
from utils.errors import DimensionMismatch, PreconditionViolation, SingularShift
from utils.settings import tolerances

SHIFT_READINGS = ("literal", "scaled")


@dataclass(frozen=True, eq=False)
class TwoParamFunction:
    circuit: ParameterizedCircuit
    i: int
    j: int
    base_point: tuple[float, ...]

    def __post_init__(self) -> None:
        n = self.circuit.n_params
        if n < 2:
            raise DimensionMismatch("Zwei-Parameter-Funktion braucht mindestens zwei Parameter")
        if self.i == self.j or not (0 <= self.i < n and 0 <= self.j < n):
            raise DimensionMismatch(f"Indizes ({self.i}, {self.j}) ungültig für {n} Parameter")
        object.__setattr__(self, "base_point", tuple(float(x) for x in self.base_point))
        if len(self.base_point) != n:
            raise DimensionMismatch("Basispunkt hat falsche Länge")

    @property
    def r_i(self) -> float:
        return self.circuit.r_of(self.i)

    @property
    def r_j(self) -> float:
        return self.circuit.r_of(self.j)

    @property
    def base_values(self) -> tuple[float, float]:
        return self.base_point[self.i], self.base_point[self.j]

    def point(self, t1: float, t2: float) -> np.ndarray:
        p = np.array(self.base_point, dtype=float)
        p[self.i] = float(t1)
        p[self.j] = float(t2)
        return p

    def along_first(self, t2: float) -> SingleComponentFunction:
        return restrict(self.circuit, self.point(self.base_point[self.i], t2), self.i)

    def along_second(self, t1: float) -> SingleComponentFunction:
        return restrict(self.circuit, self.point(t1, self.base_point[self.j]), self.j)


@dataclass(frozen=True)
class IdentityResidualReport:
    lhs: float
    rhs: float
    residual: float
    t1: float
    t2: float
    gamma1: float
    gamma2: float
    r: float
    shift_reading: str
    diagonal_shift: float


def two_param(circuit: ParameterizedCircuit, theta: Sequence[float], i: int = 0, j: int = 1) -> TwoParamFunction:
    return TwoParamFunction(circuit=circuit, i=i, j=j, base_point=tuple(np.asarray(theta, dtype=float)))


def eval2(f2: TwoParamFunction, t1: float, t2: float) -> float:
    return evaluate(f2.circuit, f2.point(t1, t2))


def _cpsr_factor(r: float, gamma: float) -> float:
    s = math.sin(2 * r * gamma)
    if abs(s) <= tolerances().singular_shift:
        raise SingularShift(f"sin(2rγ) = {s:.3e} für γ={gamma!r}")
    return r / s


def mixed_partial(
    f2: TwoParamFunction,
    t1: float,
    t2: float,
    gamma1: float | None = None,
    gamma2: float | None = None,
    order: str = "12",
) -> float:
    """∂₁∂₂f über cPSR in einer Achse, angewandt auf die cPSR der anderen Achse."""
    r1, r2 = f2.r_i, f2.r_j
    g1 = math.pi / (4 * r1) if gamma1 is None else float(gamma1)
    g2 = math.pi / (4 * r2) if gamma2 is None else float(gamma2)
    c1, c2 = _cpsr_factor(r1, g1), _cpsr_factor(r2, g2)

    if order == "12":
        def inner(s: float) -> float:
            return c2 * (eval2(f2, s, t2 + g2) - eval2(f2, s, t2 - g2))

        return c1 * (inner(t1 + g1) - inner(t1 - g1))
    if order == "21":
        def inner(s: float) -> float:
            return c1 * (eval2(f2, t1 + g1, s) - eval2(f2, t1 - g1, s))

        return c2 * (inner(t2 + g2) - inner(t2 - g2))
    raise PreconditionViolation(f"Unbekannte Reihenfolge {order!r}")


def hessian_2x2(
    f2: TwoParamFunction,
    t1: float,
    t2: float,
    gamma1: float | None = None,
    gamma2: float | None = None,
) -> np.ndarray:
    h11 = second_derivative(f2.along_first(t2), t1)
    h22 = second_derivative(f2.along_second(t1), t2)
    h12 = mixed_partial(f2, t1, t2, gamma1, gamma2, order="12")
    h21 = mixed_partial(f2, t1, t2, gamma1, gamma2, order="21")
    return np.array([[h11, h12], [h21, h22]], dtype=float)


def hessian_fd(f2: TwoParamFunction, t1: float, t2: float, step: float = 1e-3) -> np.ndarray:
    """Zentrale Differenzen zweiter Ordnung als unabhängige Gegenprobe."""
    h = float(step)
    f0 = eval2(f2, t1, t2)
    h11 = (eval2(f2, t1 + h, t2) - 2 * f0 + eval2(f2, t1 - h, t2)) / h**2
    h22 = (eval2(f2, t1, t2 + h) - 2 * f0 + eval2(f2, t1, t2 - h)) / h**2
    h12 = (
        eval2(f2, t1 + h, t2 + h)
        - eval2(f2, t1 + h, t2 - h)
        - eval2(f2, t1 - h, t2 + h)
        + eval2(f2, t1 - h, t2 - h)
    ) / (4 * h**2)
    return np.array([[h11, h12], [h12, h22]], dtype=float)


def check_discussion_identity(
    f2: TwoParamFunction,
    t1: float,
    t2: float,
    gamma1: float,
    gamma2: float,
    shift_reading: str = "literal",
) -> IdentityResidualReport:
    """Berichtet LHS, RHS und Residuum; die Gleichheit wird nicht vorausgesetzt.

    ``literal`` wertet den Diagonalterm bei (t1 + π/2, t2 + π/2) aus, ``scaled`` bei
    (t1 + π/(2r), t2 + π/(2r)).
    """
    r = f2.r_i
    if abs(f2.r_j - r) > tolerances().r_gate:
        raise PreconditionViolation(f"beide Gates brauchen dasselbe r ({r} ≠ {f2.r_j})")
    if shift_reading not in SHIFT_READINGS:
        raise PreconditionViolation(f"Unbekannte Lesart {shift_reading!r}")
    diag = math.pi / 2 if shift_reading == "literal" else math.pi / (2 * r)

    s1, s2 = math.sin(r * gamma1), math.sin(r * gamma2)
    lhs = (
        eval2(f2, t1 + gamma1, t2 + gamma2)
        + eval2(f2, t1 - gamma1, t2 - gamma2)
        - 2 * s1**2 * s2**2 * eval2(f2, t1 + diag, t2 + diag)
    )
    hess = hessian_2x2(f2, t1, t2)
    rhs = (
        2 * math.sin(2 * r * gamma1) * math.sin(2 * r * gamma2) * hess[0, 1]
        + 0.25 * math.cos(r * gamma2) ** 2 * (5 - 3 * math.cos(2 * r * gamma1)) * hess[0, 0]
        + 0.25 * math.cos(r * gamma1) ** 2 * (5 - 3 * math.cos(2 * r * gamma2)) * hess[1, 1]
    )
    return IdentityResidualReport(
        lhs=lhs,
        rhs=rhs,
        residual=abs(lhs - rhs),
        t1=float(t1),
        t2=float(t2),
        gamma1=float(gamma1),
        gamma2=float(gamma2),
        r=r,
        shift_reading=shift_reading,
        diagonal_shift=diag,
    )
