"""Bias und Varianz der Regeln: geschlossene Form gegen direkte Auswertung und Monte Carlo."""

from __future__ import annotations

import math
import sys

import pytest

from services.costfn import restrict
from services.ensembles import ensemble
from services.gradrules import (
    FD_KINDS,
    GRADIENT_KINDS,
    RuleKind,
    bias_closed_form,
    bias_literal,
    bias_variance_report,
    deterministic_bias,
    estimate,
    oracle_derivatives,
    rule_spec,
    variance_closed_form,
    variance_literal,
)
from services.oracle import fit
from utils.errors import PreconditionViolation

pytestmark = pytest.mark.lib


def _bias_tol(f, h):
    """1e-12, bei kleinem h erweitert um den Rundungsfehler eps/h des Quotienten."""
    p = fit(f)
    scale = max(1.0, abs(p.a0) + abs(p.a1) + abs(p.b1))
    return max(1e-12, 16 * sys.float_info.epsilon * scale / abs(h))


@pytest.fixture
def cos_t(cos_t_circuit):
    return restrict(cos_t_circuit, [math.pi / 2], 0)


def test_cfd_bias_value(cos_t):
    assert bias_closed_form("cFD", cos_t, math.pi / 2, 0.1) == pytest.approx(0.0016658, abs=1e-7)
    assert deterministic_bias("cFD", cos_t, math.pi / 2, 0.1) == pytest.approx(0.0016658, abs=1e-7)


def test_cfd_bias_vanishes_where_derivative_vanishes(cos_t):
    assert bias_closed_form("cFD", cos_t, 0.0, 0.3) == pytest.approx(0.0, abs=1e-15)


def test_cpsr_is_unbiased(cos_t):
    assert bias_closed_form("cPSR", cos_t, 0.7, 0.4) == pytest.approx(0.0, abs=1e-15)


def test_centered_bias_small_for_small_step(cos_t):
    f1, f2 = oracle_derivatives(cos_t, 0.8)
    assert abs(bias_closed_form("cFD", cos_t, 0.8, 1e-4)) < 1e-7 * max(abs(f1), abs(f2))


def test_closed_form_bias_matches_direct_bias(random_ensemble):
    for member in random_ensemble:
        for i in range(member.circuit.n_params):
            f = restrict(member.circuit, member.theta, i)
            t = f.base_value
            for kind in FD_KINDS:
                for h in (0.05, 0.2, -0.3):
                    closed = bias_closed_form(kind, f, t, h)
                    direct = deterministic_bias(kind, f, t, h)
                    assert closed == pytest.approx(direct, abs=_bias_tol(f, h))


def test_one_sided_biases_differ_only_in_curvature_sign(entangling_circuit):
    f = restrict(entangling_circuit, [0.2, 0.9], 0)
    t = f.base_value
    f1, f2 = oracle_derivatives(f, t)
    h, r = 0.3, f.r
    backward = bias_closed_form("bFD", f, t, h)
    forward = bias_closed_form("fFD", f, t, h)
    common = (math.sin(2 * r * h) / (2 * r * h) - 1) * f1
    curvature = (1 - math.cos(2 * r * h)) / (4 * r * r * h) * f2
    assert backward == pytest.approx(common - curvature, abs=1e-12)
    assert forward == pytest.approx(common + curvature, abs=1e-12)


def test_literal_backward_bias_matches_closed_form_only_at_r_one(cos_t, cos_2t_circuit):
    f_r1 = restrict(cos_2t_circuit, [0.6], 0)
    assert bias_literal("bFD", f_r1, 0.6, 0.2) == pytest.approx(bias_closed_form("bFD", f_r1, 0.6, 0.2), abs=1e-12)
    assert bias_literal("bFD", cos_t, 0.6, 0.2) != pytest.approx(bias_closed_form("bFD", cos_t, 0.6, 0.2), abs=1e-6)
    assert bias_literal("cFD", cos_t, 0.6, 0.2) == bias_closed_form("cFD", cos_t, 0.6, 0.2)


def test_bias_rejects_second_derivative_rule(cos_t):
    with pytest.raises(PreconditionViolation):
        bias_closed_form(RuleKind.SECOND, cos_t, 0.0, 0.1)


def test_cfd_variance_value(cos_t):
    assert variance_closed_form("cFD", cos_t, math.pi / 2, 0.1) == pytest.approx(49.5017, abs=1e-4)
    assert variance_closed_form("cFD", cos_t, math.pi / 2, 0.1, shots=100) == pytest.approx(0.495017, abs=1e-6)


def test_variance_zero_for_eigenstate(eigenstate_circuit):
    f = restrict(eigenstate_circuit, [0.3], 0)
    for kind in GRADIENT_KINDS:
        assert variance_closed_form(kind, f, 0.3, 0.2) == pytest.approx(0.0, abs=1e-15)


def test_literal_one_sided_variance_is_quarter(cos_t):
    for kind in ("bFD", "fFD"):
        closed = variance_closed_form(kind, cos_t, 1.0, 0.2)
        assert variance_literal(kind, cos_t, 1.0, 0.2) == pytest.approx(closed / 4, rel=1e-12)


def test_variance_rejects_zero_shots(cos_t):
    with pytest.raises(PreconditionViolation):
        variance_closed_form("cFD", cos_t, 0.0, 0.1, shots=0)


@pytest.mark.montecarlo
@pytest.mark.parametrize("kind,h", [("cFD", 0.1), ("bFD", 0.1), ("fFD", 0.5), ("cPSR", 0.5)])
def test_empirical_variance_within_five_percent(cos_t_circuit, kind, h):
    theta = 1.2
    f = restrict(cos_t_circuit, [theta], 0)
    result = estimate(rule_spec(kind, f.r, h), cos_t_circuit, [theta], 0, 100_000, 3)
    closed = variance_closed_form(kind, f, theta, h)
    assert result.sample_variance == pytest.approx(closed, rel=0.05)


@pytest.mark.montecarlo
def test_estimate_mean_within_five_sigma(cos_t_circuit):
    theta, h, n = math.pi / 2, 0.1, 100_000
    f = restrict(cos_t_circuit, [theta], 0)
    result = estimate(rule_spec("cFD", f.r, h), cos_t_circuit, [theta], 0, n, 8)
    expected = -1.0 + bias_closed_form("cFD", f, theta, h)
    sigma = math.sqrt(variance_closed_form("cFD", f, theta, h) / n)
    assert abs(result.mean - expected) < 5 * sigma


def test_cpsr_estimate_exact_at_eigen_shifts(cos_t_circuit):
    # θ ± π/2 landen auf Eigenzuständen von X, σ₁² = 0 an beiden Stützstellen
    result = estimate(rule_spec("cPSR", 0.5), cos_t_circuit, [math.pi / 2], 0, 10_000, 1)
    assert result.mean == pytest.approx(-1.0, abs=1e-12)
    assert result.sample_variance == pytest.approx(0.0, abs=1e-15)


def test_estimate_eigenstate_exact_with_one_shot(eigenstate_circuit):
    result = estimate(rule_spec("cFD", 1.0, 0.2), eigenstate_circuit, [0.4], 0, 1, 0)
    assert result.mean == pytest.approx(0.0, abs=1e-12)


def test_estimate_is_deterministic(entangling_circuit):
    spec = rule_spec("bFD", 0.5, 0.2)
    a = estimate(spec, entangling_circuit, [0.1, 0.5], 1, 500, 12)
    b = estimate(spec, entangling_circuit, [0.1, 0.5], 1, 500, 12)
    assert a == b


def test_estimate_rejects_rule_for_other_r(cos_t_circuit):
    with pytest.raises(PreconditionViolation):
        estimate(rule_spec("cFD", 1.0, 0.1), cos_t_circuit, [0.0], 0, 10, 0)
    with pytest.raises(PreconditionViolation):
        estimate(rule_spec("cFD", 0.5, 0.1), cos_t_circuit, [0.0], 0, 0, 0)


@pytest.mark.montecarlo
def test_bias_variance_report(cos_t_circuit):
    report = bias_variance_report("cFD", cos_t_circuit, [math.pi / 2], 0, 0.1, 50_000, 21)
    assert report.closed_form_bias == pytest.approx(0.0016658, abs=1e-7)
    assert report.closed_form_variance == pytest.approx(49.5017, abs=1e-4)
    assert report.empirical_variance == pytest.approx(report.closed_form_variance, rel=0.05)
    assert abs(report.empirical_bias - report.closed_form_bias) < 5 * math.sqrt(49.5017 / 50_000)
    assert report.shots == 50_000


def test_cfd_bias_formula_over_random_circuits(random_ensemble):
    for member in random_ensemble:
        f = restrict(member.circuit, member.theta, 0)
        t, r = f.base_value, f.r
        f1, _ = oracle_derivatives(f, t)
        for scaled_h in (0.01, 0.05, 0.2):
            h = scaled_h / r
            expected = (math.sin(2 * r * h) / (2 * r * h) - 1) * f1
            assert deterministic_bias("cFD", f, t, h) == pytest.approx(expected, abs=_bias_tol(f, h))


@pytest.mark.montecarlo
@pytest.mark.parametrize("kind", ["cFD", "bFD", "fFD", "cPSR"])
def test_empirical_variance_within_five_percent_on_random_circuits(kind):
    step = None if kind == "cPSR" else 0.2
    for member in ensemble(seed=31, count=10):
        f = restrict(member.circuit, member.theta, 0)
        result = estimate(rule_spec(kind, f.r, step), member.circuit, member.theta, 0, 200_000, 17)
        closed = variance_closed_form(kind, f, f.base_value, step)
        assert result.sample_variance == pytest.approx(closed, rel=0.05, abs=1e-9), member.circuit_id
