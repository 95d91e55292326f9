"""``gradshift gradcheck``: Master-Identität g_gPSR = a·f' + b·f'' gegen das Orakel prüfen.

Neben der CSV-Tabelle entsteht eine JSON-Zusammenfassung mit den Prüfungen für cPSR,
zweite Ableitung (Faktor 2r und alternativer Faktor 2), Rekursion und die
Äquivalenzen zu den Differenzenquotienten.
"""

from __future__ import annotations

import argparse
import logging
import math
from dataclasses import dataclass

import numpy as np

from commands.common import EXIT_OK, EXIT_VERIFY_FAILED, load_config
from services.costfn import ParameterizedCircuit, restrict
from services.ensembles import ensemble
from services.gradrules import (
    decompose,
    g_bfd,
    g_cfd,
    g_cpsr,
    g_ffd,
    g_gpsr,
    higher_derivative,
    oracle_derivatives,
    second_derivative,
    second_derivative_literal,
)
from services.oracle import alt_recurrence_factor, derivative, eval_poly, fit, recurrence_factor
from services.reports import write_csv, write_json
from utils.errors import ConfigError, SingularShift

logger = logging.getLogger(__name__)

COLUMNS = (
    "circuit_id",
    "theta",
    "gamma1",
    "gamma2",
    "g_gpsr",
    "a",
    "b",
    "oracle_f1",
    "oracle_f2",
    "residual",
)

MASTER_TOL = 1e-9
CPSR_TOL = 1e-9
SECOND_TOL = 1e-9
RECURRENCE_TOL = 1e-8
EQUIVALENCE_TOL = 1e-12
FAULT_FACTOR = 1.0 + 1e-3


@dataclass
class _Summary:
    points: int = 0
    rows: int = 0
    master_max: float = 0.0
    cpsr_max: float = 0.0
    singular_checked: int = 0
    singular_missed: int = 0
    second_max: float = 0.0
    second_literal_max: float = 0.0
    recurrence_max: float = 0.0
    recurrence_oracle_max: float = 0.0
    recurrence_literal_max: float = 0.0
    equivalence_max: float = 0.0

    def passed(self) -> bool:
        return (
            self.master_max < MASTER_TOL
            and self.cpsr_max < CPSR_TOL
            and self.singular_missed == 0
            and self.second_max < SECOND_TOL
            and self.recurrence_max < RECURRENCE_TOL
            and self.recurrence_oracle_max < RECURRENCE_TOL
            and self.equivalence_max < EQUIVALENCE_TOL
        )


def _valid_gamma(rng: np.random.Generator, r: float) -> float:
    while True:
        g = float(rng.uniform(-math.pi / r, math.pi / r))
        if abs(math.sin(2 * r * g)) > 1e-3:
            return g


def _gamma_pairs(cfg_pairs, rng: np.random.Generator, r: float, count: int) -> list[tuple[float, float]]:
    if cfg_pairs:
        try:
            return [(float(p[0]), float(p[1])) for p in cfg_pairs]
        except (TypeError, ValueError, IndexError) as e:
            raise ConfigError(f"'gamma_pairs' muss eine Liste von [γ1, γ2] sein ({e})") from e
    bound = math.pi / r
    return [(float(rng.uniform(-bound, bound)), float(rng.uniform(-bound, bound))) for _ in range(count)]


def _check_point(
    circuit: ParameterizedCircuit,
    circuit_id: str,
    theta: np.ndarray,
    i: int,
    pairs_cfg,
    rng: np.random.Generator,
    gammas_per_point: int,
    cpsr_checks: int,
    fault: bool,
    summary: _Summary,
    rows: list[dict],
) -> None:
    f = restrict(circuit, theta, i)
    poly = fit(f)
    r, t = f.r, f.base_value
    f1, f2 = oracle_derivatives(f, t, poly)

    for gamma1, gamma2 in _gamma_pairs(pairs_cfg, rng, r, gammas_per_point):
        g = g_gpsr(f, t, gamma1, gamma2)
        if fault:
            g *= FAULT_FACTOR
        dec = decompose(gamma1, gamma2, r)
        residual = abs(g - dec.combine(f1, f2))
        summary.master_max = max(summary.master_max, residual)
        rows.append(
            {
                "circuit_id": circuit_id,
                "theta": t,
                "gamma1": gamma1,
                "gamma2": gamma2,
                "g_gpsr": g,
                "a": dec.a,
                "b": dec.b,
                "oracle_f1": f1,
                "oracle_f2": f2,
                "residual": residual,
            }
        )

    gammas = [math.pi / (4 * r)] + [_valid_gamma(rng, r) for _ in range(max(0, cpsr_checks - 1))]
    for gamma in gammas:
        summary.cpsr_max = max(summary.cpsr_max, abs(g_cpsr(f, t, gamma) - f1))
    for k in range(-2, 3):
        summary.singular_checked += 1
        try:
            g_cpsr(f, t, k * math.pi / (2 * r))
        except SingularShift:
            continue
        summary.singular_missed += 1

    summary.second_max = max(summary.second_max, abs(second_derivative(f, t) - f2))
    summary.second_literal_max = max(summary.second_literal_max, abs(second_derivative_literal(f, t) - f2))

    f3_oracle = eval_poly(derivative(poly, 3), t)
    summary.recurrence_max = max(summary.recurrence_max, abs(higher_derivative(f, t, 3) - f3_oracle))
    summary.recurrence_oracle_max = max(
        summary.recurrence_oracle_max, abs(f3_oracle - recurrence_factor(r) * f1)
    )
    summary.recurrence_literal_max = max(
        summary.recurrence_literal_max, abs(f3_oracle - alt_recurrence_factor(r) * f1)
    )

    h = float(rng.uniform(0.01, 1.0)) / r
    summary.equivalence_max = max(
        summary.equivalence_max,
        abs(g_gpsr(f, t, h, h) - 2 * r * h * g_cfd(f, t, h)),
        abs(g_gpsr(f, t, 0.0, h) - r * h * g_bfd(f, t, h)),
        abs(g_gpsr(f, t, h, 0.0) - r * h * g_ffd(f, t, h)),
    )
    summary.points += 1


def run(args: argparse.Namespace) -> int:
    cfg = load_config("gradcheck", args)
    rng = np.random.default_rng(cfg.seed)
    fault = bool(cfg.get("inject_fault", False))
    gammas_per_point = cfg.int_value("gammas_per_point", 5, minimum=1)
    cpsr_checks = cfg.int_value("cpsr_gammas", 10, minimum=1)
    pairs_cfg = cfg.get("gamma_pairs")

    targets: list[tuple[ParameterizedCircuit, str, np.ndarray]] = []
    ens = cfg.get("ensemble")
    if isinstance(ens, dict):
        qubits = ens.get("qubits", [1, 4])
        members = ensemble(
            seed=int(ens.get("seed", cfg.seed)),
            count=int(ens.get("count", 200)),
            qubits=(int(qubits[0]), int(qubits[1])),
            max_params=int(ens.get("max_params", 3)),
        )
        targets = [(m.circuit, m.circuit_id, m.theta) for m in members]
    else:
        circuit = cfg.circuit()
        thetas = cfg.get("thetas") or [cfg.theta(circuit)]
        for theta in thetas:
            point = np.atleast_1d(np.asarray(theta, dtype=float))
            if point.shape[0] != circuit.n_params:
                raise ConfigError(f"θ {theta!r} passt nicht zu {circuit.n_params} Parametern")
            targets.append((circuit, circuit.name, point))

    summary = _Summary()
    rows: list[dict] = []
    for circuit, name, theta in targets:
        for i in range(circuit.n_params):
            circuit_id = name if circuit.n_params == 1 else f"{name}:{i}"
            _check_point(
                circuit, circuit_id, theta, i, pairs_cfg, rng, gammas_per_point, cpsr_checks, fault, summary, rows
            )
    summary.rows = len(rows)

    out = cfg.output("gradcheck.csv")
    write_csv(out, COLUMNS, rows)
    write_json(
        out.with_suffix(".json"),
        {
            "points": summary.points,
            "rows": summary.rows,
            "seed": cfg.seed,
            "inject_fault": fault,
            "master_identity_max_residual": summary.master_max,
            "cpsr_max_residual": summary.cpsr_max,
            "singular_shift_checked": summary.singular_checked,
            "singular_shift_missed": summary.singular_missed,
            "second_derivative_max_residual": summary.second_max,
            "second_derivative_literal_max_residual": summary.second_literal_max,
            "recurrence_max_residual": summary.recurrence_max,
            "recurrence_oracle_max_residual": summary.recurrence_oracle_max,
            "recurrence_literal_max_residual": summary.recurrence_literal_max,
            "equivalence_max_residual": summary.equivalence_max,
            "passed": summary.passed(),
        },
    )
    print(
        f"[gradcheck] {summary.points} Punkte, {summary.rows} Zeilen, "
        f"max. Residuum {summary.master_max:.3e} (cPSR {summary.cpsr_max:.3e}, "
        f"f'' {summary.second_max:.3e}, Literalfaktor 2: {summary.second_literal_max:.3e})",
        flush=True,
    )
    if not summary.passed():
        print("[gradcheck] Prüfung fehlgeschlagen", flush=True)
        return EXIT_VERIFY_FAILED
    return EXIT_OK
