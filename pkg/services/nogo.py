"""Gegenbeispiel gegen eine Vorwärts-/Rückwärts-Shift-Regel.

Zwei Funktionen f, f̃ ∈ F_r stimmen bei θ = ζ und θ = ζ + γ überein, haben bei ζ
aber verschiedene Ableitungen. Keine Abbildung g[f(θ), f(θ + γ)] kann daher f'(θ)
für alle f liefern.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from services.costfn import Fixed, Param, ParameterizedCircuit, SingleComponentFunction, restrict
from services.ensembles import random_pauli_label, random_state
from services.oracle import derivative, eval_poly, fit
from services.rgates import RGate, gate_matrix, make_r_gate
from services.statevector import (
    HermitianOperator,
    StateVector,
    apply_unitary,
    expectation,
    pauli_string,
    pauli_sum,
)
from utils.errors import ConditionViolation, PreconditionViolation
from utils.settings import tolerances

logger = logging.getLogger(__name__)

DEFAULT_ZETA = 0.3
DEFAULT_GAMMA = 0.7


@dataclass(frozen=True, eq=False)
class CounterexamplePair:
    f: SingleComponentFunction
    f_tilde: SingleComponentFunction
    zeta: float
    gamma: float
    c_perp_norm: float
    derivative_gap: float
    zeta_state: StateVector
    zeta_perp: np.ndarray
    generator_g: RGate
    generator_f: RGate
    observable_a: HermitianOperator
    observable_b: HermitianOperator
    commutator_expectation: complex

    def to_dict(self) -> dict:
        def cplx(v: np.ndarray) -> list[list[float]]:
            return [[float(z.real), float(z.imag)] for z in np.asarray(v).reshape(-1)]

        def mat(m: np.ndarray) -> list[list[list[float]]]:
            return [cplx(row) for row in np.asarray(m)]

        return {
            "zeta": self.zeta,
            "gamma": self.gamma,
            "r": self.generator_g.r,
            "c_perp_norm": self.c_perp_norm,
            "derivative_gap": self.derivative_gap,
            "commutator_expectation": [self.commutator_expectation.real, self.commutator_expectation.imag],
            "zeta_state": cplx(self.zeta_state.amplitudes),
            "zeta_perp": cplx(self.zeta_perp),
            "G": mat(self.generator_g.generator.matrix),
            "F": mat(self.generator_f.generator.matrix),
            "A": mat(self.observable_a.matrix),
            "B": mat(self.observable_b.matrix),
        }


@dataclass(frozen=True)
class NoGoReport:
    value_gap_at_zeta: float
    value_gap_at_zeta_plus_gamma: float
    derivative_gap: float
    f_prime_commutator: float
    f_prime_oracle: float
    f_tilde_prime_commutator: float
    f_tilde_prime_oracle: float

    @property
    def derivative_agreement(self) -> float:
        return max(
            abs(self.f_prime_commutator - self.f_prime_oracle),
            abs(self.f_tilde_prime_commutator - self.f_tilde_prime_oracle),
        )


def _commutator_derivative(state: StateVector, generator: np.ndarray, obs: np.ndarray) -> float:
    """⟨ζ|[iG, A]|ζ⟩."""
    psi = state.amplitudes
    comm = 1j * (generator @ obs - obs @ generator)
    return float(np.vdot(psi, comm @ psi).real)


def build_custom(
    g: HermitianOperator,
    f: HermitianOperator,
    a: HermitianOperator,
    psi: StateVector,
    zeta: float,
    gamma: float,
    *,
    check_conditions: bool = True,
) -> CounterexamplePair:
    """Konstruiert (f, f̃); ``check_conditions=False`` lässt entartete Paare zu (Tests)."""
    gate_g = make_r_gate(g)
    gate_f = make_r_gate(f)
    tol = tolerances()
    if abs(gate_g.r - gate_f.r) > tol.r_gate * max(1.0, gate_g.r):
        raise PreconditionViolation(f"G und F brauchen gleiches r ({gate_g.r} ≠ {gate_f.r})")
    r = gate_g.r
    if not 0.0 < gamma < math.pi / r:
        raise PreconditionViolation(f"γ={gamma!r} liegt nicht in (0, π/r) = (0, {math.pi / r:.6f})")

    zeta_state = apply_unitary(psi, gate_matrix(gate_g, zeta))
    moved = apply_unitary(zeta_state, gate_matrix(gate_f, gamma)).amplitudes
    overlap = np.vdot(zeta_state.amplitudes, moved)
    residual = moved - overlap * zeta_state.amplitudes
    c_perp = float(np.linalg.norm(residual))

    gm, fm, am = gate_g.generator.matrix, gate_f.generator.matrix, a.matrix
    diff = gm - fm
    comm = complex(np.vdot(zeta_state.amplitudes, (diff @ am - am @ diff) @ zeta_state.amplitudes))

    if check_conditions:
        if c_perp <= tol.nogo_c_perp:
            raise ConditionViolation(
                "c_perp", f"c⊥ = {c_perp:.3e}: e^(−iγF)|ζ⟩ ist parallel zu |ζ⟩"
            )
        if abs(comm) <= tol.nogo_commutator:
            raise ConditionViolation(
                "commutator", f"|⟨ζ|[G−F, A]|ζ⟩| = {abs(comm):.3e}: Ableitungen wären gleich"
            )

    value_g = expectation(apply_unitary(zeta_state, gate_matrix(gate_g, gamma)), a)
    value_f = expectation(StateVector(moved), a)
    if c_perp > tol.nogo_c_perp:
        zeta_perp = residual / c_perp
        # Vorzeichen so, dass f̃(ζ+γ) = ⟨ζ|e^{iγG}Ae^{−iγG}|ζ⟩ gilt
        correction = (value_g - value_f) / c_perp**2
    else:
        zeta_perp = np.zeros_like(residual)
        correction = 0.0
    b = HermitianOperator(am + correction * np.outer(zeta_perp, zeta_perp.conj()))

    q = psi.q
    f_circuit = ParameterizedCircuit(
        q=q, ops=(Param(gate_g, 0, "G"),), n_params=1, initial_state=psi, observable=a, name="nogo-f"
    )
    f_tilde_circuit = ParameterizedCircuit(
        q=q,
        ops=(Fixed(gate_matrix(gate_f, -zeta), "F(−ζ)"), Param(gate_f, 0, "F")),
        n_params=1,
        initial_state=zeta_state,
        observable=b,
        name="nogo-f-tilde",
    )
    f_fn = restrict(f_circuit, [zeta], 0)
    f_tilde_fn = restrict(f_tilde_circuit, [zeta], 0)
    gap = abs(
        _commutator_derivative(zeta_state, gm, am) - _commutator_derivative(zeta_state, fm, b.matrix)
    )
    logger.debug("Gegenbeispiel ζ=%.4f γ=%.4f: |c⊥|=%.3e, Lücke=%.6f", zeta, gamma, c_perp, gap)
    return CounterexamplePair(
        f=f_fn,
        f_tilde=f_tilde_fn,
        zeta=float(zeta),
        gamma=float(gamma),
        c_perp_norm=c_perp,
        derivative_gap=gap,
        zeta_state=zeta_state,
        zeta_perp=zeta_perp,
        generator_g=gate_g,
        generator_f=gate_f,
        observable_a=a,
        observable_b=b,
        commutator_expectation=comm,
    )


def default_operators() -> tuple[HermitianOperator, HermitianOperator, HermitianOperator]:
    """G = X, F = (Y + Z)/√2, A = Y."""
    s = 1 / math.sqrt(2)
    return pauli_string("X"), pauli_sum([(s, "Y"), (s, "Z")]), pauli_string("Y")


def rebased_state(g: HermitianOperator, zeta: float) -> StateVector:
    """|ψ⟩ = e^{iζG}|0…0⟩, sodass |ζ⟩ = |0…0⟩."""
    gate = make_r_gate(g)
    return apply_unitary(StateVector.zero(g.q), gate_matrix(gate, -zeta))


def build_default(zeta: float = DEFAULT_ZETA, gamma: float = DEFAULT_GAMMA) -> CounterexamplePair:
    g, f, a = default_operators()
    return build_custom(g, f, a, rebased_state(g, zeta), zeta, gamma)


def verify(pair: CounterexamplePair) -> NoGoReport:
    zeta, gamma = pair.zeta, pair.gamma
    poly_f = fit(pair.f)
    poly_ft = fit(pair.f_tilde)
    return NoGoReport(
        value_gap_at_zeta=abs(pair.f(zeta) - pair.f_tilde(zeta)),
        value_gap_at_zeta_plus_gamma=abs(pair.f(zeta + gamma) - pair.f_tilde(zeta + gamma)),
        derivative_gap=pair.derivative_gap,
        f_prime_commutator=_commutator_derivative(
            pair.zeta_state, pair.generator_g.generator.matrix, pair.observable_a.matrix
        ),
        f_prime_oracle=eval_poly(derivative(poly_f, 1), zeta),
        f_tilde_prime_commutator=_commutator_derivative(
            pair.zeta_state, pair.generator_f.generator.matrix, pair.observable_b.matrix
        ),
        f_tilde_prime_oracle=eval_poly(derivative(poly_ft, 1), zeta),
    )


@dataclass(frozen=True)
class GenericityResult:
    trials: int
    successes: int
    failures: dict[str, int]

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


def random_custom_inputs(
    rng: np.random.Generator, q: int = 2
) -> tuple[HermitianOperator, HermitianOperator, HermitianOperator, StateVector, float, float]:
    """Zufällige verschiedene Pauli-Strings G ≠ F, A als Summe dreier Pauli-Strings, |ψ⟩ Haar-zufällig."""
    g_label = random_pauli_label(rng, q, allow_identity=False)
    f_label = g_label
    while f_label == g_label:
        f_label = random_pauli_label(rng, q, allow_identity=False)
    a = pauli_sum((float(rng.uniform(-1.0, 1.0)), random_pauli_label(rng, q)) for _ in range(3))
    zeta = float(rng.uniform(-math.pi, math.pi))
    gamma = float(rng.uniform(0.05, math.pi - 0.05))
    return pauli_string(g_label), pauli_string(f_label), a, random_state(rng, q), zeta, gamma


def genericity_trials(seed: int, trials: int = 100, q: int = 2) -> GenericityResult:
    rng = np.random.default_rng(seed)
    failures: dict[str, int] = {}
    successes = 0
    for _ in range(trials):
        g, f, a, psi, zeta, gamma = random_custom_inputs(rng, q)
        try:
            pair = build_custom(g, f, a, psi, zeta, gamma)
        except ConditionViolation as e:
            failures[e.condition] = failures.get(e.condition, 0) + 1
            continue
        report = verify(pair)
        if (
            report.value_gap_at_zeta < 1e-10
            and report.value_gap_at_zeta_plus_gamma < 1e-10
            and report.derivative_gap > 1e-6
        ):
            successes += 1
        else:
            failures["verify"] = failures.get("verify", 0) + 1
    logger.info("Generizität: %d/%d Paare erfolgreich", successes, trials)
    return GenericityResult(trials=trials, successes=successes, failures=failures)
