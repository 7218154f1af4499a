"""Seeded random streams and trial partitioning."""

from __future__ import annotations

import numpy as np

# Largest number of blocks drawn in one vectorised batch.
CHUNK = 1 << 18


def as_generator(rng_state) -> np.random.Generator:
    """Return a Generator for an int seed, a SeedSequence or a Generator."""
    if isinstance(rng_state, np.random.Generator):
        return rng_state
    if isinstance(rng_state, np.random.SeedSequence):
        return np.random.default_rng(rng_state)
    if rng_state is None:
        raise ValueError("an explicit seed or Generator is required")
    return np.random.default_rng(int(rng_state))


def substreams(rng_state, partitions: int) -> list[np.random.Generator]:
    """Independent generators, one per partition.

    The result depends only on the seed and ``partitions``, so merged
    estimates are reproducible for a fixed partition count.
    """
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    if partitions == 1:
        return [as_generator(rng_state)]
    if isinstance(rng_state, np.random.Generator):
        return rng_state.spawn(partitions)
    if isinstance(rng_state, np.random.SeedSequence):
        seq = rng_state
    else:
        seq = np.random.SeedSequence(int(rng_state))
    return [np.random.default_rng(s) for s in seq.spawn(partitions)]


def split(total: int, parts: int) -> list[int]:
    """Split ``total`` trials into ``parts`` near-equal counts."""
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def chunks(total: int, size: int = CHUNK):
    """Yield batch sizes summing to ``total``."""
    while total > 0:
        n = min(total, size)
        yield n
        total -= n
