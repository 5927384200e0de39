"""Deterministic random streams.

Every random quantity in the package flows from a single 64-bit seed.  Named
substreams are derived with a splitmix64 walk over the stream name, so adding
or reordering consumers never perturbs the draws of an existing stream.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One step of the splitmix64 sequence (public-domain constants)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, name: str) -> int:
    """Fold a stream name into the seed, one splitmix step per byte."""
    key = seed & _MASK64
    for byte in name.encode("utf-8"):
        key = splitmix64(key ^ byte)
    return splitmix64(key)


def named_stream(seed: int, name: str) -> np.random.Generator:
    """A numpy Generator whose state depends only on (seed, name)."""
    return np.random.Generator(np.random.PCG64(derive_key(seed, name)))
