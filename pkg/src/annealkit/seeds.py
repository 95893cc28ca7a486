"""Deterministic stream derivation for ensemble runs.

A single master seed plus an arbitrary key tuple (size, velocity,
realization, site, ...) is hashed into an independent random stream via
numpy's SeedSequence, feeding a counter-based Philox generator.  Streams
derived from distinct keys are statistically independent, and the
derivation does not depend on the order in which streams are created, so
parallel workers can draw their own streams race-free.
"""

from __future__ import annotations

import numpy as np


def _key_to_ints(key) -> list[int]:
    out = []
    for item in key:
        if isinstance(item, (int, np.integer)):
            out.append(int(item) & 0xFFFFFFFFFFFFFFFF)
        elif isinstance(item, (float, np.floating)):
            # floats (e.g. a velocity) keyed by their exact IEEE-754 bits
            out.append(int(np.float64(item).view(np.uint64)))
        elif isinstance(item, str):
            out.extend(item.encode("utf-8"))
        else:
            raise TypeError(f"unsupported seed key component: {item!r}")
    return out


def seed_sequence(master_seed: int, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, *_key_to_ints(key)])


def stream(master_seed: int, *key) -> np.random.Generator:
    """Independent, reproducible generator for (master_seed, *key)."""
    return np.random.Generator(np.random.Philox(seed_sequence(master_seed, *key)))
