"""Fixtures für die Kommandozeilen-Tests."""

from __future__ import annotations

import json
from pathlib import Path

import pytest


@pytest.fixture
def write_config(tmp_path):
    """Schreibt ein Konfigurations-Dict als JSON nach ``tmp_path`` und gibt den Pfad zurück."""

    def _write(data: dict, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write
