"""Counter-based splittable randomness.

Every random draw in the package flows from one master seed through
``stream(master_seed, *path)``, where the path is a tuple of small
integers such as (trial_index, substream).  Streams are Philox
generators keyed by a SeedSequence spawn key, so the same (seed, path)
yields the same stream on any machine, process, or worker schedule.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "SeedRecord"]


def stream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the given derivation path."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


class SeedRecord(tuple):
    """(master_seed, *path) actually used to produce an object."""

    def __new__(cls, master_seed: int, *path: int):
        return super().__new__(cls, (master_seed, *path))

    @property
    def master_seed(self) -> int:
        return self[0]

    @property
    def path(self) -> tuple:
        return tuple(self[1:])
