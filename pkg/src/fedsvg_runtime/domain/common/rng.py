"""Seeded random streams.

Every random draw in the pipeline comes from numpy's PCG64 bit generator. Streams
that must be independent of processing order (one per volume, per client round,
per node) are spawned from ``SeedSequence(seed, spawn_key=(salt, *key))`` so that
any subset can be regenerated without replaying the others, and streams of
different seeds, salts or keys never coincide.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Fixed salts keep the per-purpose streams of one run apart.
SALT_VOLUME = 0x564F_4C4D
SALT_PARTITION = 0x5041_5254
SALT_INIT = 0x494E_4954
SALT_CLIENT = 0x434C_4E54
SALT_PATCHES = 0x5041_5443


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def substream(seed: int, *key: int, salt: int = 0) -> np.random.Generator:
    """Generator for the independent substream ``key`` of ``seed``."""
    sequence = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=(int(salt), *(int(k) for k in key)))
    return np.random.Generator(np.random.PCG64(sequence))
