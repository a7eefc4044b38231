"""Deterministic keyed random streams.

Every noise draw in the simulator comes from a counter-based generator whose
key is derived from (seed, context labels). Streams for different contexts
(layer, tile, role) are independent, and draws inside one stream happen in a
fixed row-major order, so results do not depend on evaluation order or on how
work is parallelized across columns or design points.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream_key(seed: int, *parts: int | str) -> int:
    """Stable 128-bit key from a seed and context labels.

    Uses a hash of the canonical byte encoding, so keys are reproducible
    across processes and platforms (unlike the builtin ``hash``).
    """
    h = hashlib.sha256()
    h.update(int(seed).to_bytes(16, "little", signed=True))
    for part in parts:
        if isinstance(part, str):
            h.update(b"s" + part.encode("utf-8") + b"\x00")
        else:
            h.update(b"i" + int(part).to_bytes(16, "little", signed=True))
    return int.from_bytes(h.digest()[:16], "little")


def keyed_rng(seed: int, *parts: int | str) -> np.random.Generator:
    """Counter-based generator for the stream identified by (seed, *parts)."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, *parts)))
