"""Laufzeit-Einstellungen und numerische Toleranzen (aus Umgebung bzw. ``.env``)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

MAX_QUBITS_HARD = 6


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-12
    hermitian: float = 1e-12
    unitary: float = 1e-12
    imaginary: float = 1e-12
    degeneracy: float = 1e-9
    projector: float = 1e-10
    r_gate: float = 1e-10
    probability_sum: float = 1e-10
    fit_residual: float = 1e-10
    singular_shift: float = 1e-9
    zero_step: float = 1e-12
    nogo_c_perp: float = 1e-8
    nogo_commutator: float = 1e-8
    negative_variance: float = 1e-12


@dataclass(frozen=True)
class LabSettings:
    default_seed: int = 0
    output_dir: Path = Path("results")
    max_qubits: int = MAX_QUBITS_HARD
    log_level: str = "INFO"
    tolerances: Tolerances = field(default_factory=Tolerances)


_settings: LabSettings | None = None


def _int_from_env(name: str, default: int) -> int:
    raw = (os.environ.get(name) or "").strip()
    if not raw:
        return default
    try:
        return int(raw, 0)
    except ValueError:
        print(f"[settings] {name}={raw!r} ist keine Ganzzahl – verwende {default}", flush=True)
        return default


def _read_settings_from_environ() -> LabSettings:
    try:
        from dotenv import load_dotenv

        load_dotenv()
    except ImportError:
        pass

    out_dir = (os.environ.get("GRADSHIFT_OUT_DIR") or "").strip() or "results"
    max_qubits = min(_int_from_env("GRADSHIFT_MAX_QUBITS", MAX_QUBITS_HARD), MAX_QUBITS_HARD)
    return LabSettings(
        default_seed=_int_from_env("GRADSHIFT_SEED", 0),
        output_dir=Path(out_dir),
        max_qubits=max(1, max_qubits),
        log_level=(os.environ.get("GRADSHIFT_LOG_LEVEL") or "INFO").strip().upper(),
    )


def configure_lab(settings: LabSettings | None = None) -> None:
    """Einstellungen explizit setzen (Tests) oder mit ``None`` neu aus der Umgebung lesen."""
    global _settings
    _settings = settings if settings is not None else _read_settings_from_environ()


def get_settings() -> LabSettings:
    if _settings is None:
        configure_lab()
    assert _settings is not None
    return _settings


def tolerances() -> Tolerances:
    return get_settings().tolerances
