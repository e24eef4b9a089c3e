"""Deterministic seeded PRNG used for every random choice in the package.

A single generator family (splitmix64) backs weight initialization, dataset
shuffling, and perturbation sampling, so that any run is reproducible from
its integer seed alone.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


class SplitMix64:
    """splitmix64 stream: 64-bit state advanced by a fixed odd constant.

    Uniform doubles take the top 53 bits of each output, giving values in
    [0, 1). Shuffles are in-place Fisher-Yates from the highest index down.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform_array(self, n: int) -> np.ndarray:
        """Vectorized equivalent of n successive uniform() calls.

        splitmix64 is counter-based: output i depends only on
        seed + i * GOLDEN, so the whole block can be computed with wrapping
        uint64 array arithmetic and is bit-identical to the scalar path.
        """
        with np.errstate(over="ignore"):
            steps = np.arange(1, n + 1, dtype=np.uint64)
            z = np.uint64(self._state) + steps * np.uint64(_GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        self._state = (self._state + n * _GOLDEN) & _MASK64
        return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), derived from the 53-bit uniform."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        return min(int(self.uniform() * n), n - 1)

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle, high index to low."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
