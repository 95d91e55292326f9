#!/usr/bin/env python3
"""
gradshift – Labor für Gradientenregeln parametrisierter Quantenschaltungen.

Aufruf:

    python gradshift.py gradcheck --config configs/gradcheck_cos_t.json
    python gradshift.py bias-sweep --config configs/bias_sweep_cos_t.json --out results/bias.csv
    python gradshift.py variance-sweep --config configs/variance_sweep_cos_t.json --shots 100000
    python gradshift.py nogo --zeta 0.3 --gamma 0.7
    python gradshift.py optimize --config configs/optimize_cos_t.json
    python gradshift.py hessian --config configs/hessian_2q.json --shift-reading both

Exit-Code 0: Erfolg, 1: Prüfung fehlgeschlagen, 2: Aufruf-/Konfigurationsfehler.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Sequence

from commands import gradcheck, hessian, nogo, optimize, sweeps
from commands.common import EXIT_USAGE, EXIT_VERIFY_FAILED
from utils.errors import (
    ConditionViolation,
    ConfigError,
    DimensionMismatch,
    GradshiftError,
    OperatorValidation,
    PreconditionViolation,
    RGateValidation,
    SingularShift,
    ZeroStep,
    cli_error,
)
from utils.settings import get_settings

logger = logging.getLogger("gradshift")

Handler = Callable[[argparse.Namespace], int]

_USAGE_ERRORS = (
    ConfigError,
    PreconditionViolation,
    ConditionViolation,
    SingularShift,
    ZeroStep,
    DimensionMismatch,
    OperatorValidation,
    RGateValidation,
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment-Konfiguration (JSON)")
    common.add_argument("--seed", type=int, default=None, help="Seed (Standard: GRADSHIFT_SEED)")
    common.add_argument("--shots", type=int, default=None, help="Shots pro Auswertung")
    common.add_argument("--out", default=None, help="Ausgabedatei (Standard: GRADSHIFT_OUT_DIR)")
    common.add_argument(
        "--shift-reading",
        dest="shift_reading",
        choices=("literal", "scaled", "both"),
        default=None,
        help="Lesart der Diagonalverschiebung π/2 bzw. π/(2r) (hessian)",
    )

    parser = argparse.ArgumentParser(prog="gradshift", description="Gradientenregeln prüfen und vermessen")
    sub = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, tuple[Handler, str]] = {
        "gradcheck": (gradcheck.run, "Master-Identität und Orakelprüfungen"),
        "bias-sweep": (sweeps.run_bias, "Bias über ein Schrittweitengitter"),
        "variance-sweep": (sweeps.run_variance, "Varianz über ein Schrittweitengitter (Monte Carlo)"),
        "nogo": (nogo.run, "Gegenbeispiel gegen Vorwärts-/Rückwärts-Shift-Regeln"),
        "optimize": (optimize.run, "Gradientenabstieg mit wählbarer Regel"),
        "hessian": (hessian.run, "2×2-Hesse-Matrix und Residuenbericht"),
    }
    for name, (handler, help_text) in commands.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "nogo":
            nogo.add_arguments(p)
        p.set_defaults(handler=handler)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    try:
        return int(args.handler(args))
    except _USAGE_ERRORS as e:
        return cli_error(f"{args.command}: {e}", EXIT_USAGE)
    except GradshiftError as e:
        logger.exception("%s fehlgeschlagen", args.command)
        return cli_error(f"{args.command}: {e}", EXIT_VERIFY_FAILED)


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
