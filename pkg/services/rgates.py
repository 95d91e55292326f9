"""r-Gates: Generatoren mit genau zwei Eigenwerten ±r und ihre Unitären e^{−iθG}."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from services.statevector import HermitianOperator, UnitaryMatrix, eigendecompose
from utils.errors import RGateValidation
from utils.settings import tolerances

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RGate:
    """Zentrierter Generator G mit G² = r²·1.

    ``center`` ist der abgezogene Mittelwert (e0 + e1)/2 des Rohgenerators; er
    entspricht einer globalen Phase und ändert keinen Erwartungswert.
    """

    generator: HermitianOperator
    r: float
    was_centered: bool = False
    center: float = 0.0

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise RGateValidation(f"r muss positiv sein, erhalten {self.r!r}")
        g = self.generator.matrix
        deviation = float(np.max(np.abs(g @ g - self.r**2 * np.eye(g.shape[0]))))
        if deviation >= tolerances().r_gate * max(1.0, self.r**2):
            raise RGateValidation(f"G² ≠ r²·1 (Abweichung {deviation:.3e})")

    @property
    def dim(self) -> int:
        return self.generator.dim

    @property
    def period(self) -> float:
        """Periode der Erwartungswerte, π/r."""
        return math.pi / self.r


def make_r_gate(generator: HermitianOperator, tol: float | None = None) -> RGate:
    spectrum = eigendecompose(generator, tol)
    count = len(spectrum.eigenvalues)
    if count != 2:
        raise RGateValidation(
            f"Generator hat {count} verschiedene Eigenwerte, ein r-Gate braucht genau 2"
        )
    e0, e1 = max(spectrum.eigenvalues), min(spectrum.eigenvalues)
    r = (e0 - e1) / 2
    center = (e0 + e1) / 2
    if center == 0.0:
        return RGate(generator=generator, r=r)
    # jeder Mittelwert ≠ 0 wird abgezogen, als zentriert gilt nur ein nennenswerter
    was_centered = abs(center) > tolerances().degeneracy * max(1.0, abs(e0))
    if was_centered:
        logger.debug("Generator zentriert: Mittelwert %.6g abgezogen", center)
    return RGate(generator=generator.shifted(center), r=r, was_centered=was_centered, center=center)


def gate_matrix(gate: RGate, theta: float) -> UnitaryMatrix:
    """e^{−iθG} = cos(rθ)·1 − i·(G/r)·sin(rθ); θ wird nicht gefaltet."""
    rt = gate.r * float(theta)
    eye = np.eye(gate.dim, dtype=complex)
    return UnitaryMatrix(math.cos(rt) * eye - 1j * (gate.generator.matrix / gate.r) * math.sin(rt))
