"""``gradshift bias-sweep`` und ``gradshift variance-sweep``: Bias und Varianz der
Gradientenregeln über einem Schrittweitengitter, geschlossen und gemessen."""

from __future__ import annotations

import argparse
import logging
import sys

from commands.common import EXIT_OK, EXIT_VERIFY_FAILED, ExperimentConfig, load_config
from services.costfn import restrict
from services.gradrules import (
    GRADIENT_KINDS,
    RuleKind,
    bias_closed_form,
    bias_literal,
    bias_variance_report,
    deterministic_bias,
    variance_closed_form,
    variance_literal,
)
from services.oracle import fit
from services.reports import write_csv
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

COLUMNS = (
    "rule",
    "h",
    "closed_form_bias",
    "deterministic_bias",
    "closed_form_variance",
    "empirical_variance",
    "shots",
    "literal_bias",
    "literal_variance",
    "variance_ratio_literal",
)

VARIANCE_REL_TOL = 0.05
DEFAULT_RULES = ("cFD", "bFD", "fFD")
DEFAULT_STEPS = (0.05, 0.1, 0.2)


def _bias_tolerance(h: float, scale: float) -> float:
    # Rundungsfehler des Differenzenquotienten wächst wie eps/h
    return max(1e-12, 16 * sys.float_info.epsilon * scale / abs(h))


def _rules(cfg: ExperimentConfig) -> list[RuleKind]:
    raw = cfg.get("rules", list(DEFAULT_RULES))
    if isinstance(raw, str):
        raw = [raw]
    kinds = [RuleKind.parse(k) for k in raw]
    bad = [k.value for k in kinds if k not in GRADIENT_KINDS]
    if bad:
        raise ConfigError(f"Regeln ohne Bias/Varianz-Sweep: {bad}")
    return kinds


def _sweep(cfg: ExperimentConfig, default_shots: int, default_name: str, check_variance: bool) -> int:
    circuit = cfg.circuit()
    theta = cfg.theta(circuit)
    component = cfg.int_value("component", 0, minimum=0)
    if component >= circuit.n_params:
        raise ConfigError(f"'component'={component} außerhalb 0..{circuit.n_params - 1}")
    steps = cfg.float_list("steps", list(DEFAULT_STEPS), nonzero=True)
    kinds = _rules(cfg)
    shots = cfg.shot_count(default_shots)
    if check_variance and shots < 1:
        raise ConfigError("variance-sweep braucht shots >= 1")

    f = restrict(circuit, theta, component)
    poly = fit(f)
    t = f.base_value
    scale = max(1.0, abs(poly.a0) + abs(poly.a1) + abs(poly.b1))

    rows: list[dict] = []
    failures = 0
    for kind in kinds:
        for h in steps:
            closed_bias = bias_closed_form(kind, f, t, h, poly)
            det_bias = deterministic_bias(kind, f, t, h, poly)
            closed_var = variance_closed_form(kind, f, t, h)
            literal_var = variance_literal(kind, f, t, h)
            if abs(det_bias - closed_bias) >= _bias_tolerance(h, scale):
                logger.warning("%s h=%g: Bias %.3e ≠ %.3e", kind.value, h, det_bias, closed_bias)
                failures += 1
            row = {
                "rule": kind.value,
                "h": h,
                "closed_form_bias": closed_bias,
                "deterministic_bias": det_bias,
                "closed_form_variance": closed_var,
                "empirical_variance": None,
                "shots": shots,
                "literal_bias": bias_literal(kind, f, t, h, poly),
                "literal_variance": literal_var,
                "variance_ratio_literal": None,
            }
            if shots >= 1:
                report = bias_variance_report(kind, circuit, theta, component, h, shots, cfg.seed)
                row["empirical_variance"] = report.empirical_variance
                if literal_var > 0:
                    row["variance_ratio_literal"] = report.empirical_variance / literal_var
                if check_variance:
                    deviation = abs(report.empirical_variance - closed_var)
                    if deviation > VARIANCE_REL_TOL * closed_var + 1e-12:
                        logger.warning(
                            "%s h=%g: Varianz %.6g weicht von %.6g ab", kind.value, h, report.empirical_variance, closed_var
                        )
                        failures += 1
            rows.append(row)

    write_csv(cfg.output(default_name), COLUMNS, rows)
    print(f"[{cfg.command}] {len(rows)} Zeilen, {failures} Abweichungen", flush=True)
    return EXIT_VERIFY_FAILED if failures else EXIT_OK


def run_bias(args: argparse.Namespace) -> int:
    return _sweep(load_config("bias-sweep", args), 0, "bias_sweep.csv", check_variance=False)


def run_variance(args: argparse.Namespace) -> int:
    return _sweep(load_config("variance-sweep", args), 100_000, "variance_sweep.csv", check_variance=True)
