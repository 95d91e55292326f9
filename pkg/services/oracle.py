"""Exaktes trigonometrisches Polynom a0 + a1·cos(2rt) + b1·sin(2rt) als Ableitungsorakel.

Jede Funktion aus F_r hat diese Form (G² = r²·1). Die Koeffizienten kommen aus drei
Stützstellen, damit das Orakel keinen Code mit den Gradientenregeln teilt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from services.costfn import SingleComponentFunction
from utils.errors import NotAnRGateFunction, PreconditionViolation
from utils.settings import tolerances

# feste Prüfpunkte für den Residuentest, damit fit() deterministisch bleibt
_RESIDUAL_SEED = 20220301
_RESIDUAL_POINTS = 8


@dataclass(frozen=True)
class TrigPoly:
    a0: float
    a1: float
    b1: float
    r: float

    @property
    def omega(self) -> float:
        return 2.0 * self.r

    def __call__(self, t: float) -> float:
        return eval_poly(self, t)

    def coefficients(self) -> tuple[float, float, float]:
        return (self.a0, self.a1, self.b1)


def eval_poly(p: TrigPoly, t: float) -> float:
    wt = p.omega * float(t)
    return p.a0 + p.a1 * math.cos(wt) + p.b1 * math.sin(wt)


def fit(f: SingleComponentFunction) -> TrigPoly:
    r = f.r
    f0 = f(0.0)
    f_quarter = f(math.pi / (4 * r))
    f_half = f(math.pi / (2 * r))
    a0 = (f0 + f_half) / 2
    poly = TrigPoly(a0=a0, a1=(f0 - f_half) / 2, b1=f_quarter - a0, r=r)

    scale = max(1.0, abs(poly.a0), abs(poly.a1), abs(poly.b1))
    rng = np.random.default_rng(_RESIDUAL_SEED)
    for t in rng.uniform(0.0, 2 * math.pi / r, _RESIDUAL_POINTS):
        residual = abs(eval_poly(poly, t) - f(t))
        if residual >= tolerances().fit_residual * scale:
            raise NotAnRGateFunction(
                f"Residuum {residual:.3e} bei t={t:.6f}: Komponente {f.component} "
                "ist kein r-Gate-Erwartungswert"
            )
    return poly


def derivative(p: TrigPoly, n: int = 1) -> TrigPoly:
    """n-te Ableitung, analytisch auf Koeffizientenebene."""
    if n < 0:
        raise PreconditionViolation("Ableitungsordnung muss >= 0 sein")
    a0, a1, b1 = p.a0, p.a1, p.b1
    w = p.omega
    for _ in range(n):
        a0, a1, b1 = 0.0, b1 * w, -a1 * w
    return TrigPoly(a0=a0, a1=a1, b1=b1, r=p.r)


def recurrence_factor(r: float) -> float:
    """f^(n+2) = −(2r)²·f^(n) für n >= 1."""
    return -((2.0 * r) ** 2)


def alt_recurrence_factor(r: float) -> float:
    """Koeffizient −1/(4r²) der Alternativform; stimmt nur bei r = 1/2 mit −(2r)² überein."""
    return -1.0 / (4.0 * r * r)
