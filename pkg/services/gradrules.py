"""Einkomponenten-Gradientenregeln: gPSR, cPSR, cFD/bFD/fFD, zweite und höhere Ableitungen.

Alle Regeln sind gewichtete Summen Σ w_k·f(θ + s_k). Über den gPSR lässt sich jede
davon als a·f'(θ) + b·f''(θ) schreiben; daraus folgen Bias und Varianz in
geschlossener Form.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

import numpy as np

from services.costfn import (
    EstimatorResult,
    ParameterizedCircuit,
    SingleComponentFunction,
    draw_shots,
    evaluate,
    one_shot_variance,
    restrict,
    summarize_shots,
)
from services.oracle import TrigPoly, derivative, eval_poly, fit, recurrence_factor
from utils.errors import PreconditionViolation, SingularShift, ZeroStep
from utils.settings import tolerances

logger = logging.getLogger(__name__)


class RFunction(Protocol):
    r: float

    def __call__(self, t: float) -> float: ...


class RuleKind(str, Enum):
    GPSR = "gPSR"
    CPSR = "cPSR"
    CFD = "cFD"
    BFD = "bFD"
    FFD = "fFD"
    SECOND = "second-derivative"

    @classmethod
    def parse(cls, value: "str | RuleKind") -> "RuleKind":
        if isinstance(value, RuleKind):
            return value
        wanted = str(value).strip().lower()
        for kind in cls:
            if kind.value.lower() == wanted:
                return kind
        raise PreconditionViolation(f"Unbekannte Regel {value!r}")


FD_KINDS = (RuleKind.CFD, RuleKind.BFD, RuleKind.FFD)
GRADIENT_KINDS = (RuleKind.CPSR, *FD_KINDS)
ONE_SIDED_KINDS = (RuleKind.BFD, RuleKind.FFD)


@dataclass(frozen=True)
class GradientRuleSpec:
    kind: RuleKind
    shifts: tuple[tuple[float, float], ...]
    r: float

    @property
    def offsets(self) -> tuple[float, ...]:
        return tuple(o for o, _ in self.shifts)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.shifts)


@dataclass(frozen=True)
class RuleDecomposition:
    """Regelausgabe = a·f'(θ) + b·f''(θ)."""

    a: float
    b: float

    def combine(self, f1: float, f2: float) -> float:
        return self.a * f1 + self.b * f2

    def scaled(self, factor: float) -> "RuleDecomposition":
        return RuleDecomposition(a=self.a * factor, b=self.b * factor)


@dataclass(frozen=True)
class BiasVarianceReport:
    closed_form_bias: float
    empirical_bias: float
    closed_form_variance: float
    empirical_variance: float
    shots: int


@dataclass(frozen=True)
class FullGradient:
    values: np.ndarray
    evaluations: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def default_step(kind: RuleKind | str, r: float) -> float:
    kind = RuleKind.parse(kind)
    if kind in FD_KINDS:
        return 0.05 / r
    if kind is RuleKind.SECOND:
        return math.pi / (2 * r)
    return math.pi / (4 * r)


def _check_step(h: float) -> float:
    if abs(h) <= tolerances().zero_step:
        raise ZeroStep(f"Schrittweite h={h!r} ist null")
    return float(h)


def _check_shift(gamma: float, r: float) -> float:
    s = math.sin(2 * r * gamma)
    if abs(s) <= tolerances().singular_shift:
        raise SingularShift(f"sin(2rγ) = {s:.3e} für γ={gamma!r}, r={r!r}")
    return s


def rule_spec(
    kind: RuleKind | str, r: float, step: float | None = None, gamma2: float | None = None
) -> GradientRuleSpec:
    """Verschiebungen und Gewichte einer Regel; ``step`` ist h bzw. γ (γ1 beim gPSR)."""
    kind = RuleKind.parse(kind)
    s = default_step(kind, r) if step is None else float(step)
    if kind is RuleKind.GPSR:
        g2 = s if gamma2 is None else float(gamma2)
        shifts = ((s, r), (-g2, -r))
    elif kind is RuleKind.CPSR:
        w = r / _check_shift(s, r)
        shifts = ((s, w), (-s, -w))
    elif kind is RuleKind.CFD:
        h = _check_step(s)
        shifts = ((h, 1 / (2 * h)), (-h, -1 / (2 * h)))
    elif kind is RuleKind.BFD:
        h = _check_step(s)
        shifts = ((0.0, 1 / h), (-h, -1 / h))
    elif kind is RuleKind.FFD:
        h = _check_step(s)
        shifts = ((h, 1 / h), (0.0, -1 / h))
    else:
        half = math.pi / (2 * r)
        shifts = ((half, 2 * r * r), (0.0, -2 * r * r))
    return GradientRuleSpec(kind=kind, shifts=shifts, r=r)


def apply_rule(spec: GradientRuleSpec, f: RFunction, theta: float) -> float:
    return sum(w * f(theta + o) for o, w in spec.shifts)


def g_gpsr(f: RFunction, theta: float, gamma1: float, gamma2: float) -> float:
    return f.r * (f(theta + gamma1) - f(theta - gamma2))


def decompose(gamma1: float, gamma2: float, r: float) -> RuleDecomposition:
    w = 2 * r
    return RuleDecomposition(
        a=(math.sin(w * gamma1) + math.sin(w * gamma2)) / 2,
        b=-(math.cos(w * gamma1) - math.cos(w * gamma2)) / (4 * r),
    )


def decomposition_for(
    kind: RuleKind | str, r: float, step: float | None = None, gamma2: float | None = None
) -> RuleDecomposition:
    """(a, b) einer beliebigen Regel, hergeleitet aus der gPSR-Zerlegung."""
    kind = RuleKind.parse(kind)
    s = default_step(kind, r) if step is None else float(step)
    if kind is RuleKind.GPSR:
        return decompose(s, s if gamma2 is None else gamma2, r)
    if kind is RuleKind.CPSR:
        _check_shift(s, r)
        return RuleDecomposition(a=1.0, b=0.0)
    if kind is RuleKind.SECOND:
        return RuleDecomposition(a=0.0, b=1.0)
    h = _check_step(s)
    if kind is RuleKind.CFD:
        return decompose(h, h, r).scaled(1 / (2 * r * h))
    if kind is RuleKind.BFD:
        return decompose(0.0, h, r).scaled(1 / (r * h))
    return decompose(h, 0.0, r).scaled(1 / (r * h))


def g_cpsr(f: RFunction, theta: float, gamma: float | None = None) -> float:
    g = math.pi / (4 * f.r) if gamma is None else float(gamma)
    s = _check_shift(g, f.r)
    return f.r * (f(theta + g) - f(theta - g)) / s


def g_cfd(f: RFunction, theta: float, h: float) -> float:
    h = _check_step(h)
    return (f(theta + h) - f(theta - h)) / (2 * h)


def g_bfd(f: RFunction, theta: float, h: float) -> float:
    h = _check_step(h)
    return (f(theta) - f(theta - h)) / h


def g_ffd(f: RFunction, theta: float, h: float) -> float:
    h = _check_step(h)
    return (f(theta + h) - f(theta)) / h


def second_derivative(f: RFunction, theta: float) -> float:
    return 2 * f.r * g_gpsr(f, theta, math.pi / (2 * f.r), 0.0)


def second_derivative_literal(f: RFunction, theta: float) -> float:
    """Variante mit Vorfaktor 2 statt 2r; nur für Berichte, exakt bei r = 1."""
    return 2 * g_gpsr(f, theta, math.pi / (2 * f.r), 0.0)


def higher_derivative(f: RFunction, theta: float, n: int) -> float:
    if n < 1:
        raise PreconditionViolation("higher_derivative braucht n >= 1 (n = 0: evaluate)")
    factor = recurrence_factor(f.r)
    if n % 2:
        return factor ** ((n - 1) // 2) * g_cpsr(f, theta)
    return factor ** ((n - 2) // 2) * second_derivative(f, theta)


def _rule_output(kind: RuleKind, f: RFunction, theta: float, step: float) -> float:
    if kind is RuleKind.CFD:
        return g_cfd(f, theta, step)
    if kind is RuleKind.BFD:
        return g_bfd(f, theta, step)
    if kind is RuleKind.FFD:
        return g_ffd(f, theta, step)
    if kind is RuleKind.CPSR:
        return g_cpsr(f, theta, step)
    raise PreconditionViolation(f"{kind.value} schätzt nicht f'")


def _oracle_for(f: RFunction, poly: TrigPoly | None) -> TrigPoly:
    if poly is not None:
        return poly
    if isinstance(f, TrigPoly):
        return f
    return fit(f)  # type: ignore[arg-type]


def oracle_derivatives(f: RFunction, theta: float, poly: TrigPoly | None = None) -> tuple[float, float]:
    p = _oracle_for(f, poly)
    return eval_poly(derivative(p, 1), theta), eval_poly(derivative(p, 2), theta)


def bias_closed_form(
    kind: RuleKind | str, f: RFunction, theta: float, h: float, poly: TrigPoly | None = None
) -> float:
    """E[ĝ] − f'(θ) = (a − 1)·f'(θ) + b·f''(θ) mit (a, b) aus ``decomposition_for``."""
    kind = RuleKind.parse(kind)
    if kind not in GRADIENT_KINDS:
        raise PreconditionViolation(f"Bias nur für {', '.join(k.value for k in GRADIENT_KINDS)}")
    dec = decomposition_for(kind, f.r, h)
    f1, f2 = oracle_derivatives(f, theta, poly)
    return (dec.a - 1.0) * f1 + dec.b * f2


def bias_literal(
    kind: RuleKind | str, f: RFunction, theta: float, h: float, poly: TrigPoly | None = None
) -> float:
    """Alternativform des bFD/fFD-Bias: [sin(2rh)/(2h) − 1]·f' + (cos(2rh) − 1)/(4rh)·f''."""
    kind = RuleKind.parse(kind)
    if kind not in ONE_SIDED_KINDS:
        return bias_closed_form(kind, f, theta, h, poly)
    h = _check_step(h)
    r = f.r
    f1, f2 = oracle_derivatives(f, theta, poly)
    return (math.sin(2 * r * h) / (2 * h) - 1) * f1 + (math.cos(2 * r * h) - 1) / (4 * r * h) * f2


def deterministic_bias(
    kind: RuleKind | str, f: RFunction, theta: float, h: float, poly: TrigPoly | None = None
) -> float:
    kind = RuleKind.parse(kind)
    f1, _ = oracle_derivatives(f, theta, poly)
    return _rule_output(kind, f, theta, h) - f1


def variance_closed_form(
    kind: RuleKind | str,
    f: SingleComponentFunction,
    theta: float,
    step: float | None = None,
    shots: int = 1,
    gamma2: float | None = None,
) -> float:
    """Var = Σ w_k²·σ₁²(θ + s_k) / n aus der Gewichtsliste der Regel."""
    if shots < 1:
        raise PreconditionViolation("shots muss >= 1 sein")
    spec = rule_spec(kind, f.r, step, gamma2)
    return sum(w * w * one_shot_variance(f, theta + o) for o, w in spec.shifts) / shots


def variance_literal(
    kind: RuleKind | str, f: SingleComponentFunction, theta: float, h: float, shots: int = 1
) -> float:
    """Alternativform für bFD/fFD mit Nenner 4h²; für andere Regeln gleich der Gewichtsform."""
    kind = RuleKind.parse(kind)
    if kind not in ONE_SIDED_KINDS:
        return variance_closed_form(kind, f, theta, h, shots)
    h = _check_step(h)
    other = theta - h if kind is RuleKind.BFD else theta + h
    return (one_shot_variance(f, theta) + one_shot_variance(f, other)) / (4 * h * h) / shots


def estimate(
    rule: GradientRuleSpec,
    circuit: ParameterizedCircuit,
    theta: Sequence[float] | np.ndarray,
    i: int,
    shots_per_eval: int,
    seed: int,
) -> EstimatorResult:
    """Shot-Schätzer ĝ: jede verschobene Auswertung aus eigenem Strom (seed, k).

    Die j-ten Shots aller Verschiebungen bilden den j-ten Einzelshot-Schätzer;
    ``sample_variance`` ist damit die Varianz von ĝ bei einem Shot pro Auswertung.
    """
    f = restrict(circuit, theta, i)
    if abs(rule.r - f.r) > tolerances().r_gate:
        raise PreconditionViolation(f"Regel für r={rule.r} passt nicht zu Gate mit r={f.r}")
    if shots_per_eval < 1:
        raise PreconditionViolation("shots_per_eval muss >= 1 sein")
    combined = np.zeros(shots_per_eval, dtype=float)
    for k, (offset, weight) in enumerate(rule.shifts):
        combined += weight * draw_shots(f, shots_per_eval, seed, theta=f.base_value + offset, stream=k)
    return summarize_shots(combined, seed)


def bias_variance_report(
    kind: RuleKind | str,
    circuit: ParameterizedCircuit,
    theta: Sequence[float] | np.ndarray,
    i: int,
    step: float,
    shots: int,
    seed: int,
) -> BiasVarianceReport:
    kind = RuleKind.parse(kind)
    f = restrict(circuit, theta, i)
    poly = fit(f)
    t = f.base_value
    f1, _ = oracle_derivatives(f, t, poly)
    result = estimate(rule_spec(kind, f.r, step), circuit, theta, i, shots, seed)
    return BiasVarianceReport(
        closed_form_bias=bias_closed_form(kind, f, t, step, poly),
        empirical_bias=result.mean - f1,
        closed_form_variance=variance_closed_form(kind, f, t, step),
        empirical_variance=result.sample_variance,
        shots=shots,
    )


def evaluations_per_gradient(kind: RuleKind | str, n_params: int) -> int:
    kind = RuleKind.parse(kind)
    return n_params + 1 if kind in ONE_SIDED_KINDS else 2 * n_params


def full_gradient(
    kind: RuleKind | str,
    circuit: ParameterizedCircuit,
    theta: Sequence[float] | np.ndarray,
    mode: str = "exact",
    step: float | None = None,
    shots: int = 1,
    seed: int = 0,
) -> FullGradient:
    """Gradient über alle Komponenten; bFD/fFD teilen sich die unverschobene Auswertung."""
    kind = RuleKind.parse(kind)
    if kind not in GRADIENT_KINDS:
        raise PreconditionViolation(f"{kind.value} ist keine Gradientenregel")
    if mode not in ("exact", "shots"):
        raise PreconditionViolation(f"Unbekannter Modus {mode!r}")
    if mode == "shots" and shots < 1:
        raise PreconditionViolation("shots muss >= 1 sein")

    point = np.asarray(theta, dtype=float).reshape(-1)
    evaluations = 0

    def measure(p: np.ndarray) -> float:
        nonlocal evaluations
        stream = evaluations
        evaluations += 1
        if mode == "exact":
            return evaluate(circuit, p)
        return float(np.mean(draw_shots(circuit, shots, seed, theta=p, stream=stream)))

    shared = measure(point) if kind in ONE_SIDED_KINDS else None
    values = np.zeros(circuit.n_params, dtype=float)
    for i in range(circuit.n_params):
        spec = rule_spec(kind, circuit.r_of(i), step)
        total = 0.0
        for offset, weight in spec.shifts:
            if offset == 0.0 and shared is not None:
                total += weight * shared
                continue
            shifted = point.copy()
            shifted[i] += offset
            total += weight * measure(shifted)
        values[i] = total
    logger.debug("full_gradient %s: %d Auswertungen", kind.value, evaluations)
    return FullGradient(values=values, evaluations=evaluations)
