"""Project-wide deterministic random number streams.

Every stochastic component receives its own explicitly-derived stream so
results are bit-reproducible across platforms and worker counts. Streams
are numpy Philox generators (counter-based) keyed by a SplitMix64 mix of
the base seed and any number of integer stream identifiers.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 step; the project's documented seed-mixing function."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix_seed(base_seed: int, *streams: int) -> int:
    """Fold stream identifiers into a base seed, one SplitMix64 step each."""
    key = splitmix64(base_seed & _MASK64)
    for s in streams:
        key = splitmix64((key ^ (s & _MASK64)) & _MASK64)
    return key


def make_rng(base_seed: int, *streams: int) -> np.random.Generator:
    """Create an independent Philox generator for (base_seed, *streams)."""
    return np.random.Generator(np.random.Philox(key=mix_seed(base_seed, *streams)))
