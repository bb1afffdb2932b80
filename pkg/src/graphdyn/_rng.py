"""Seed splitting: one global seed, an independent stream per operation name."""

import zlib

import numpy as np


def rng_for(seed: int, op: str) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(zlib.crc32(op.encode()),))
    return np.random.default_rng(ss)
