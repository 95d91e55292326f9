"""Seedbare, zählerbasierte Zufallsströme (Philox) für Shot-Sampling.

Jeder Strom ist durch das Paar (seed, stream) eindeutig bestimmt. Eine Auswertung
an einem verschobenen Parameterpunkt bekommt ihren eigenen Strom, daher hängt das
Ergebnis nicht von der Reihenfolge ab, in der Punkte ausgewertet werden.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_key(seed: int, stream: int = 0) -> int:
    if stream < 0:
        raise ValueError("stream muss >= 0 sein")
    return ((stream & _MASK64) << 64) | (seed & _MASK64)


def shot_generator(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, stream)))


def shot_uniforms(seed: int, stream: int, count: int) -> np.ndarray:
    """``count`` gleichverteilte Zahlen in [0, 1); Shot k ist der k-te Wert des Stroms."""
    return shot_generator(seed, stream).random(count)
