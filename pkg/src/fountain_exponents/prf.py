"""Counter-based pseudorandom function built on the splitmix64 finalizer.

Every random quantity in the codec is ``uniform(seed, tag, *counters)``:
a pure function of its coordinates, so encoder and decoder regenerate any
codeword symbol or switch decision in O(1) without shared state, and
results do not depend on evaluation order or thread count.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# domain-separation tags for the independent streams
TAG_CODEBOOK = 1
TAG_SWITCH = 2
TAG_NOISE = 3
TAG_THIN = 4
TAG_STARVE = 5
TAG_MESSAGE = 6
TAG_TRIAL = 7


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash64(seed: int, tag: int, *counters) -> np.ndarray:
    """Hash of ``(seed, tag, counters...)``; counters broadcast as arrays."""
    with np.errstate(over="ignore"):
        h = _mix(np.uint64(seed & MASK64) + _GOLDEN * np.uint64(tag & MASK64))
        for c in counters:
            c = np.asarray(c).astype(np.uint64)
            h = _mix(h ^ (c + _GOLDEN))
    return h


def uniform(seed: int, tag: int, *counters) -> np.ndarray:
    """Uniform doubles in [0, 1) with 53 random bits."""
    return (hash64(seed, tag, *counters) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def derive_seed(seed: int, tag: int, *counters: int) -> int:
    """A fresh 64-bit seed, e.g. one per Monte Carlo trial."""
    return int(hash64(seed, tag, *counters))
