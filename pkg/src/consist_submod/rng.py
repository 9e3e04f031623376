"""Seedable, splittable random streams.

Every randomized routine takes either a ``numpy.random.Generator`` or an integer
seed. Named child streams are derived deterministically, so a run replays
bit-exactly from ``(seed, name)`` regardless of the order in which other
streams are consumed.
"""
import os
import zlib

import numpy as np

DEFAULT_SEED = 20240917
SEED_ENV = "CONSIST_SUBMOD_SEED"


def default_seed():
    value = os.environ.get(SEED_ENV)
    return int(value) if value not in (None, "") else DEFAULT_SEED


def _name_key(name):
    return [zlib.crc32(part.encode()) for part in str(name).split("/") if part]


def make_rng(seed=None, name=None):
    """Generator for ``seed`` (or the default seed), optionally split by ``name``."""
    if isinstance(seed, np.random.Generator):
        if name is None:
            return seed
        seed = int(seed.integers(2**63))
    if seed is None:
        seed = default_seed()
    key = _name_key(name) if name is not None else []
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def child_seed(seed, name):
    """Integer seed for a named child stream."""
    return int(make_rng(seed, name).integers(2**63))
