"""Deterministic random-number plumbing.

All stochastic code in the package draws from numpy PCG64 generators that
are seeded either directly or through :func:`mix64`, so a (seed, task)
pair maps to one bit-reproducible stream on every platform.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(seed: int, index: int) -> int:
    """Derive an independent 64-bit stream seed from (master seed, index).

    SplitMix64 finalizer applied to ``seed + (index + 1) * GOLDEN``; the
    finalizer has full avalanche, so consecutive indices give statistically
    independent seeds.  Replica i of any parallel computation uses
    ``mix64(master_seed, i)``, which makes results independent of worker
    scheduling.
    """
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def generator(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def replica_generator(master_seed: int, index: int) -> np.random.Generator:
    """Generator for replica ``index`` of a run with the given master seed."""
    return generator(mix64(master_seed, index))
