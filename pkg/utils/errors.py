"""Fehlerhierarchie und einheitliche CLI-Fehlerausgabe."""

from __future__ import annotations

import sys


class GradshiftError(RuntimeError):
    """Basisklasse aller fachlichen Fehler."""


class OperatorValidation(GradshiftError, ValueError):
    """Matrix ist nicht hermitesch/unitär bzw. Pauli-Label ungültig."""


class DimensionMismatch(GradshiftError, ValueError):
    """Dimensionen von Zustand, Operator oder Parametervektor passen nicht."""


class ConsistencyError(GradshiftError):
    """Interne numerische Konsistenz verletzt (Norm, Imaginärteil, Wahrscheinlichkeiten)."""


class RGateValidation(GradshiftError, ValueError):
    """Generator hat nicht genau zwei verschiedene Eigenwerte."""


class NotAnRGateFunction(GradshiftError):
    """Einkomponenten-Funktion ist kein trigonometrisches Polynom ersten Grades in 2rθ."""


class SingularShift(GradshiftError, ValueError):
    """|sin(2rγ)| zu klein für die zentrierte Shift-Regel."""


class ZeroStep(GradshiftError, ValueError):
    """Schrittweite h der Differenzenquotienten ist (numerisch) null."""


class PreconditionViolation(GradshiftError, ValueError):
    """Eingabe verletzt eine Voraussetzung (z. B. γ außerhalb von (0, π/r))."""


class ConditionViolation(GradshiftError):
    """Generizitätsbedingung der Gegenbeispiel-Konstruktion verletzt."""

    def __init__(self, condition: str, message: str) -> None:
        super().__init__(message)
        self.condition = condition


class ConfigError(GradshiftError, ValueError):
    """Experiment- oder Schaltungskonfiguration ungültig."""


def cli_error(msg: str, code: int = 2) -> int:
    print(f"[gradshift] FEHLER: {msg}", file=sys.stderr, flush=True)
    return code
