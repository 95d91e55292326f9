"""``gradshift nogo``: Gegenbeispielpaar konstruieren, prüfen und als JSON ablegen."""

from __future__ import annotations

import argparse
import logging

from commands.common import EXIT_OK, EXIT_VERIFY_FAILED, load_config
from services.circuit_spec import parse_pauli_sum, parse_state
from services.nogo import (
    DEFAULT_GAMMA,
    DEFAULT_ZETA,
    build_custom,
    default_operators,
    genericity_trials,
    rebased_state,
    verify,
)
from services.reports import write_json
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

VALUE_GAP_TOL = 1e-10
DERIVATIVE_GAP_MIN = 1e-6
AGREEMENT_TOL = 1e-9


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--zeta", type=float, default=None, help="ζ (Standard 0.3)")
    parser.add_argument("--gamma", type=float, default=None, help="γ in (0, π/r) (Standard 0.7)")
    parser.add_argument("--G", dest="g", default=None, help="Generator G als Pauli-Summe, z. B. 'X'")
    parser.add_argument("--F", dest="f", default=None, help="Generator F, z. B. '1/sqrt(2)*Y + 1/sqrt(2)*Z'")
    parser.add_argument("--A", dest="a", default=None, help="Observable A, z. B. 'Y'")
    parser.add_argument("--trials", type=int, default=None, help="zusätzliche Zufallsversuche (Generizität)")


def run(args: argparse.Namespace) -> int:
    cfg = load_config("nogo", args)
    zeta = args.zeta if getattr(args, "zeta", None) is not None else cfg.float_value("zeta", DEFAULT_ZETA)
    gamma = args.gamma if getattr(args, "gamma", None) is not None else cfg.float_value("gamma", DEFAULT_GAMMA)

    g_default, f_default, a_default = default_operators()
    texts = {
        "G": getattr(args, "g", None) or cfg.get("G"),
        "F": getattr(args, "f", None) or cfg.get("F"),
        "A": getattr(args, "a", None) or cfg.get("A"),
    }
    g = parse_pauli_sum(texts["G"]) if texts["G"] else g_default
    f = parse_pauli_sum(texts["F"]) if texts["F"] else f_default
    a = parse_pauli_sum(texts["A"]) if texts["A"] else a_default
    if not (g.q == f.q == a.q):
        raise ConfigError("G, F und A müssen auf gleich vielen Qubits wirken")
    psi = parse_state(cfg.get("psi"), g.q) if cfg.get("psi") is not None else rebased_state(g, zeta)

    pair = build_custom(g, f, a, psi, zeta, gamma)
    report = verify(pair)
    ok = (
        report.value_gap_at_zeta < VALUE_GAP_TOL
        and report.value_gap_at_zeta_plus_gamma < VALUE_GAP_TOL
        and report.derivative_gap > DERIVATIVE_GAP_MIN
        and report.derivative_agreement < AGREEMENT_TOL
    )

    print(f"[nogo] ζ={zeta:.6g} γ={gamma:.6g} r={pair.generator_g.r:.6g} |c⊥|={pair.c_perp_norm:.6g}", flush=True)
    print(f"[nogo] |f(ζ) − f̃(ζ)|       = {report.value_gap_at_zeta:.3e}", flush=True)
    print(f"[nogo] |f(ζ+γ) − f̃(ζ+γ)|   = {report.value_gap_at_zeta_plus_gamma:.3e}", flush=True)
    print(
        f"[nogo] |f'(ζ) − f̃'(ζ)|     = {report.derivative_gap:.12g} "
        f"(f'={report.f_prime_commutator:.6g}, f̃'={report.f_tilde_prime_commutator:.6g})",
        flush=True,
    )

    payload = {
        "pair": pair.to_dict(),
        "report": {
            "value_gap_at_zeta": report.value_gap_at_zeta,
            "value_gap_at_zeta_plus_gamma": report.value_gap_at_zeta_plus_gamma,
            "derivative_gap": report.derivative_gap,
            "f_prime_commutator": report.f_prime_commutator,
            "f_prime_oracle": report.f_prime_oracle,
            "f_tilde_prime_commutator": report.f_tilde_prime_commutator,
            "f_tilde_prime_oracle": report.f_tilde_prime_oracle,
            "derivative_agreement": report.derivative_agreement,
        },
        "operators": {k: (v or "default") for k, v in texts.items()},
        "passed": ok,
    }

    trials = args.trials if getattr(args, "trials", None) is not None else cfg.int_value("trials", 0, minimum=0)
    if trials < 0:
        raise ConfigError("--trials darf nicht negativ sein")
    if trials:
        result = genericity_trials(cfg.seed, trials)
        payload["genericity"] = {
            "seed": cfg.seed,
            "trials": result.trials,
            "successes": result.successes,
            "rate": result.rate,
            "failures": result.failures,
        }
        print(f"[nogo] Zufallsversuche: {result.successes}/{result.trials} erfolgreich", flush=True)

    write_json(cfg.output("nogo.json"), payload)
    if not ok:
        print("[nogo] Gegenbeispiel verletzt eine Bedingung", flush=True)
        return EXIT_VERIFY_FAILED
    return EXIT_OK
