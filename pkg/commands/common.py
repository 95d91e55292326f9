"""Gemeinsame Konfigurationslogik der Kommandos: JSON-Datei plus Flags, Flags gewinnen."""

from __future__ import annotations

import argparse
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from services.circuit_spec import circuit_from_dict, load_circuit
from services.costfn import ParameterizedCircuit
from utils.errors import ConfigError
from utils.settings import get_settings

logger = logging.getLogger(__name__)

REPO_ROOT = Path(__file__).resolve().parent.parent

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    data: dict[str, Any] = field(default_factory=dict)
    source: Path | None = None
    seed: int = 0
    shots: int | None = None
    out: Path | None = None
    shift_reading: str | None = None

    def get(self, key: str, default: Any = None) -> Any:
        return self.data.get(key, default)

    def _resolve(self, raw: str) -> Path:
        p = Path(raw)
        if p.is_absolute():
            return p
        bases = [Path.cwd(), REPO_ROOT]
        if self.source is not None:
            bases.insert(0, self.source.parent)
        for base in bases:
            if (base / p).is_file():
                return base / p
        return p

    def circuit(self, default_file: str | None = None) -> ParameterizedCircuit:
        inline = self.data.get("circuit")
        if isinstance(inline, dict):
            return circuit_from_dict(inline, name=f"{self.command}-inline")
        raw = self.data.get("circuit_file") or default_file
        if not raw:
            raise ConfigError("'circuit_file' fehlt in der Konfiguration")
        return load_circuit(self._resolve(str(raw)))

    def float_value(self, key: str, default: float | None = None) -> float:
        value = self.data.get(key, default)
        if value is None:
            raise ConfigError(f"'{key}' fehlt in der Konfiguration")
        try:
            out = float(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"'{key}' muss eine Zahl sein, erhalten {value!r}") from e
        if not math.isfinite(out):
            raise ConfigError(f"'{key}' ist nicht endlich")
        return out

    def int_value(self, key: str, default: int | None = None, minimum: int | None = None) -> int:
        value = self.data.get(key, default)
        try:
            out = int(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"'{key}' muss eine Ganzzahl sein, erhalten {value!r}") from e
        if minimum is not None and out < minimum:
            raise ConfigError(f"'{key}' muss >= {minimum} sein, erhalten {out}")
        return out

    def float_list(self, key: str, default: list[float] | None = None, *, nonzero: bool = False) -> list[float]:
        value = self.data.get(key, default)
        if not isinstance(value, list) or not value:
            raise ConfigError(f"'{key}' muss eine nicht-leere Liste sein")
        try:
            out = [float(v) for v in value]
        except (TypeError, ValueError) as e:
            raise ConfigError(f"'{key}' enthält keine Zahl: {value!r}") from e
        if nonzero and any(v == 0.0 for v in out):
            raise ConfigError(f"'{key}' darf keine 0 enthalten")
        return out

    def theta(self, circuit: ParameterizedCircuit, key: str = "theta") -> list[float]:
        value = self.data.get(key)
        if value is None:
            return [0.0] * circuit.n_params
        if isinstance(value, (int, float)):
            value = [value]
        theta = [float(v) for v in value]
        if len(theta) != circuit.n_params:
            raise ConfigError(f"'{key}' hat Länge {len(theta)}, Schaltung hat {circuit.n_params} Parameter")
        return theta

    def shot_count(self, default: int) -> int:
        shots = self.shots if self.shots is not None else self.data.get("shots", default)
        try:
            shots = int(shots)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"'shots' muss eine Ganzzahl sein, erhalten {shots!r}") from e
        if shots < 0:
            raise ConfigError("'shots' darf nicht negativ sein")
        return shots

    def output(self, default_name: str) -> Path:
        if self.out is not None:
            return self.out
        raw = self.data.get("out")
        if raw:
            return Path(str(raw))
        return get_settings().output_dir / default_name


def load_config(command: str, args: argparse.Namespace) -> ExperimentConfig:
    data: dict[str, Any] = {}
    source: Path | None = None
    if getattr(args, "config", None):
        source = Path(args.config)
        if not source.is_file():
            raise ConfigError(f"Konfigurationsdatei fehlt: {source}")
        try:
            data = json.loads(source.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{source}: kein gültiges JSON ({e})") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{source}: Konfiguration muss ein JSON-Objekt sein")

    seed = args.seed if getattr(args, "seed", None) is not None else data.get("seed", get_settings().default_seed)
    try:
        seed = int(seed)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"'seed' muss eine Ganzzahl sein, erhalten {seed!r}") from e
    if seed < 0:
        raise ConfigError("'seed' darf nicht negativ sein")

    shots = getattr(args, "shots", None)
    if shots is not None and shots < 1:
        raise ConfigError("--shots muss >= 1 sein")
    out = Path(args.out) if getattr(args, "out", None) else None
    shift_reading = getattr(args, "shift_reading", None) or data.get("shift_reading")
    logger.debug("Konfiguration %s: Quelle=%s, seed=%d", command, source, seed)
    return ExperimentConfig(
        command=command,
        data=data,
        source=source,
        seed=seed,
        shots=shots,
        out=out,
        shift_reading=shift_reading,
    )
