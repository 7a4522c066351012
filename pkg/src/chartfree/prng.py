"""Counter-based 64-bit pseudo-random streams.

Each stream is splitmix64 driven by an explicit counter: output i is
mix64(key + (i+1) * GOLDEN) with the standard shift-xor-multiply finalizer.
Being counter-based makes draws vectorizable and makes independent named
streams trivial: a stream key is the mix of the master seed with the hash of
the stream label.  All arithmetic is modulo 2^64 on numpy uint64 arrays, so
sequences are identical on every platform.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _label_key(label: str) -> np.ndarray:
    key = np.zeros(1, dtype=np.uint64)
    for ch in label.encode("utf-8"):
        key = _mix64(key ^ np.uint64(ch)) + _GOLDEN
    return key


class Stream:
    """One deterministic stream; draws advance an internal counter."""

    def __init__(self, seed: int, label: str = ""):
        base = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64)
        self._key = _mix64(base ^ _label_key(label))
        self._counter = 0

    def split(self, label: str) -> "Stream":
        child = Stream.__new__(Stream)
        child._key = _mix64(self._key ^ _label_key(label))
        child._counter = 0
        return child

    def next_u64(self, n: int) -> np.ndarray:
        idx = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        return _mix64(self._key + idx * _GOLDEN)

    def uniform(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """n doubles in [low, high) with 53-bit resolution."""
        u = (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return low + (high - low) * u

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n): argsort of per-slot random keys."""
        return np.argsort(self.next_u64(n), kind="stable")

    def choice_sorted(self, n: int, k: int) -> np.ndarray:
        """k of n indices without replacement, returned in ascending order."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot take {k} of {n}")
        return np.sort(self.permutation(n)[:k])
