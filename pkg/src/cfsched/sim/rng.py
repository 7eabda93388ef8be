"""Counter-keyed random streams.

Every stream is a Philox generator whose key is derived from the master
seed and a tuple of integer coordinates (experiment, cell, trial, slot,
...).  Draws therefore depend only on those coordinates and never on the
order in which work units run.
"""

from __future__ import annotations

import zlib

import numpy as np

from ..errors import InvalidInputError

__all__ = ["stream", "experiment_key", "sample_channel", "sample_channels", "CHANNEL_KEY", "SCHEDULE_KEY"]

# last stream coordinate separating channel draws from scheduling draws
CHANNEL_KEY = 0
SCHEDULE_KEY = 1


def experiment_key(name: str) -> int:
    """Stable integer key for an experiment name."""
    return zlib.crc32(name.encode("utf-8"))


def stream(seed: int, *keys: int) -> np.random.Generator:
    if seed < 0 or any(k < 0 for k in keys):
        raise InvalidInputError("seed and stream keys must be nonnegative")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def sample_channel(L: int, rng: np.random.Generator) -> np.ndarray:
    """``L`` i.i.d. standard normal channel gains."""
    if L < 1:
        raise InvalidInputError("L must be at least 1")
    return rng.standard_normal(L)


def sample_channels(seed: int, keys: tuple[int, ...], slot: int, M: int, L: int) -> np.ndarray:
    """``(M, L)`` gains for one slot; row ``m`` is relay ``m``."""
    rng = stream(seed, *keys, slot, CHANNEL_KEY)
    return rng.standard_normal((M, L))
