"""``gradshift optimize``: einfacher Gradientenabstieg mit wählbarer Gradientenregel."""

from __future__ import annotations

import argparse
import logging

import numpy as np

from commands.common import EXIT_OK, EXIT_VERIFY_FAILED, load_config
from services.costfn import evaluate
from services.gradrules import GRADIENT_KINDS, RuleKind, evaluations_per_gradient, full_gradient
from services.reports import write_csv
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

COLUMNS = ("iter", "F_exact", "grad_norm", "total_circuit_evals")


def _iteration_seed(seed: int, iteration: int) -> int:
    return int(np.random.SeedSequence([seed, iteration]).generate_state(1, dtype=np.uint64)[0])


def run(args: argparse.Namespace) -> int:
    cfg = load_config("optimize", args)
    circuit = cfg.circuit()
    theta = np.asarray(cfg.theta(circuit, "theta0"), dtype=float)
    kind = RuleKind.parse(cfg.get("rule", "cPSR"))
    if kind not in GRADIENT_KINDS:
        raise ConfigError(f"Regel {kind.value} liefert keinen Gradienten")
    eta = cfg.float_value("step_size", 0.1)
    if eta <= 0:
        raise ConfigError("'step_size' muss positiv sein")
    iterations = cfg.int_value("iterations", 200, minimum=1)
    mode = str(cfg.get("mode", "shots" if cfg.shots is not None else "exact"))
    if mode not in ("exact", "shots"):
        raise ConfigError(f"'mode' muss exact oder shots sein, erhalten {mode!r}")
    shots = cfg.shot_count(1000) if mode == "shots" else 1
    if mode == "shots" and shots < 1:
        raise ConfigError("shots muss >= 1 sein")
    step = cfg.get("h")
    step = None if step is None else cfg.float_value("h")
    target = cfg.get("target_value")
    target = None if target is None else cfg.float_value("target_value")

    per_step = evaluations_per_gradient(kind, circuit.n_params)
    rows: list[dict] = []
    total = 0
    best = float("inf")
    for it in range(iterations + 1):
        value = evaluate(circuit, theta)
        best = min(best, value)
        row = {"iter": it, "F_exact": value, "grad_norm": None, "total_circuit_evals": total}
        # am Endpunkt folgt kein Schritt mehr, also auch kein Gradient
        if it < iterations:
            grad = full_gradient(
                kind, circuit, theta, mode=mode, step=step, shots=shots, seed=_iteration_seed(cfg.seed, it)
            )
            if grad.evaluations != per_step:
                logger.warning("Auswertungen %d ≠ erwartet %d", grad.evaluations, per_step)
            total += grad.evaluations
            row.update(grad_norm=grad.norm(), total_circuit_evals=total)
            theta = theta - eta * grad.values
        rows.append(row)

    write_csv(cfg.output("optimize.csv"), COLUMNS, rows)
    print(
        f"[optimize] {kind.value} ({mode}): F {rows[0]['F_exact']:.6g} → {rows[-1]['F_exact']:.6g} "
        f"nach {iterations} Schritten, {total} Schaltungsauswertungen",
        flush=True,
    )
    if target is not None and best > target:
        print(f"[optimize] Zielwert {target:.6g} nicht erreicht (bestes F {best:.6g})", flush=True)
        return EXIT_VERIFY_FAILED
    return EXIT_OK
