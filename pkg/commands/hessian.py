"""``gradshift hessian``: 2×2-Hesse-Matrix per verschachtelter cPSR, Gegenprobe mit
finiten Differenzen und Residuenbericht der Vier-Term-Kombination."""

from __future__ import annotations

import argparse
import logging
import math

import numpy as np

from commands.common import EXIT_OK, EXIT_VERIFY_FAILED, load_config
from services.costfn import ParameterizedCircuit
from services.ensembles import random_circuit, random_theta
from services.multiparam import SHIFT_READINGS, check_discussion_identity, hessian_2x2, hessian_fd, two_param
from services.reports import write_csv
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

COLUMNS = (
    "record",
    "shift_reading",
    "gamma1",
    "gamma2",
    "h11",
    "h12",
    "h21",
    "h22",
    "fd_max_dev",
    "lhs",
    "rhs",
    "residual",
)

SYMMETRY_TOL = 1e-9
DEFAULT_GAMMA_PAIRS = ([0.0, 0.0], [0.3, 0.5], [math.pi / 8, math.pi / 4])


def _readings(value: str | None) -> tuple[str, ...]:
    if value in (None, "", "both"):
        return SHIFT_READINGS
    if value not in SHIFT_READINGS:
        raise ConfigError(f"shift_reading muss literal, scaled oder both sein, erhalten {value!r}")
    return (value,)


def _targets(cfg) -> list[tuple[str, ParameterizedCircuit, np.ndarray]]:
    ens = cfg.get("ensemble")
    if isinstance(ens, dict):
        rng = np.random.default_rng(int(ens.get("seed", cfg.seed)))
        qubits = ens.get("qubits", [2, 3])
        r_choices = [float(r) for r in ens.get("r_choices", [0.5, 1.0])]
        out = []
        for k in range(int(ens.get("count", 20))):
            q = int(rng.integers(int(qubits[0]), int(qubits[1]) + 1))
            r = float(rng.choice(r_choices))
            circuit = random_circuit(rng, q, 2, r_choices=(r,), normalize=True, name=f"hess-{k}")
            out.append((circuit.name, circuit, random_theta(rng, circuit)))
        return out
    circuit = cfg.circuit()
    if circuit.n_params < 2:
        raise ConfigError("hessian braucht eine Schaltung mit mindestens zwei Parametern")
    return [(circuit.name, circuit, np.asarray(cfg.theta(circuit), dtype=float))]


def run(args: argparse.Namespace) -> int:
    cfg = load_config("hessian", args)
    readings = _readings(cfg.shift_reading)
    fd_step = cfg.float_value("fd_step", 1e-3)
    fd_tol = cfg.float_value("fd_tol", 1e-5)
    i = cfg.int_value("i", 0, minimum=0)
    j = cfg.int_value("j", 1, minimum=0)
    raw_pairs = cfg.get("gamma_pairs", [list(p) for p in DEFAULT_GAMMA_PAIRS])
    try:
        pairs = [(float(p[0]), float(p[1])) for p in raw_pairs]
    except (TypeError, ValueError, IndexError) as e:
        raise ConfigError(f"'gamma_pairs' muss eine Liste von [γ1, γ2] sein ({e})") from e
    if not pairs:
        raise ConfigError("'gamma_pairs' ist leer")

    rows: list[dict] = []
    failures = 0
    for record, circuit, theta in _targets(cfg):
        f2 = two_param(circuit, theta, i, j)
        t1, t2 = f2.base_values
        hess = hessian_2x2(f2, t1, t2)
        fd_dev = float(np.max(np.abs(hess - hessian_fd(f2, t1, t2, fd_step))))
        asym = abs(hess[0, 1] - hess[1, 0])
        if asym > SYMMETRY_TOL or fd_dev >= fd_tol:
            logger.warning("%s: Asymmetrie %.3e, FD-Abweichung %.3e", record, asym, fd_dev)
            failures += 1
        same_r = abs(f2.r_i - f2.r_j) <= 1e-10
        for gamma1, gamma2 in pairs:
            for reading in readings:
                row = {
                    "record": record,
                    "shift_reading": reading,
                    "gamma1": gamma1,
                    "gamma2": gamma2,
                    "h11": hess[0, 0],
                    "h12": hess[0, 1],
                    "h21": hess[1, 0],
                    "h22": hess[1, 1],
                    "fd_max_dev": fd_dev,
                    "lhs": None,
                    "rhs": None,
                    "residual": None,
                }
                if same_r:
                    rep = check_discussion_identity(f2, t1, t2, gamma1, gamma2, reading)
                    row.update(lhs=rep.lhs, rhs=rep.rhs, residual=rep.residual)
                rows.append(row)

    write_csv(cfg.output("hessian.csv"), COLUMNS, rows)
    print(f"[hessian] {len(rows)} Zeilen ({', '.join(readings)}), {failures} Hesse-Abweichungen", flush=True)
    return EXIT_VERIFY_FAILED if failures else EXIT_OK
