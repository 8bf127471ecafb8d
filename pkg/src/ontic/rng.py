"""Seeded, splittable random streams.

Every sampling routine in the package takes a :class:`numpy.random.Generator`.
Streams derived with :func:`stream` depend only on ``(seed, key)``, so work
split into keyed chunks reproduces bit-for-bit regardless of how the chunks
are scheduled.
"""

from __future__ import annotations

import numpy as np

SeedLike = int | np.random.Generator | None


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("a seed is required; wall-clock seeding is not supported")
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator addressed by ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit integer from ``rng`` to seed a keyed family of streams."""
    return int(rng.integers(0, 2**63 - 1))
