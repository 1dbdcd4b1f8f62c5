"""Counter-based random streams derived from a single experiment seed.

A stream is addressed by a path of integers, e.g. (trial, draw), and is the
same no matter which thread or in which order it is created.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def seed_of(seed: int, *path: int) -> int:
    """A derived 63-bit integer seed, for reports of sub-experiments."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))
