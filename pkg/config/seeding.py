"""
All randomness flows from one master seed.  Each subsystem asks for its own
stream by a fixed label, so adding a sampler or a new consumer never shifts
the draws of an unrelated stream.

    rng = rng_for(seed, "split")
    rng = rng_for(seed, "sampler", 2, "dns:c=10")
"""

from __future__ import annotations

import zlib

import numpy as np


def _label_key(label: object) -> int:
    return zlib.crc32(str(label).encode("utf-8"))


def seed_sequence(seed: int, *labels: object) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed)] + [_label_key(lbl) for lbl in labels])


def rng_for(seed: int, *labels: object) -> np.random.Generator:
    """Independent Generator for (seed, labels...)."""
    return np.random.default_rng(seed_sequence(seed, *labels))
