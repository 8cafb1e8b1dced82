"""Deterministic 64-bit random generator used for every seeded choice.

All sampling, shuffling, k-means++ seeding, and weight initialization in
this package draws from the splitmix64 sequence below, so a fixed seed
reproduces runs bit-for-bit across platforms (the only platform-dependent
step is libm's cos/sin inside the Gaussian transform).

The sequence is the standard splitmix64: state advances by the 64-bit
golden-ratio constant and each output is the finalizing mix of the new
state.  Because output i depends only on ``seed + (i+1)*GOLDEN``, blocks
of outputs can be computed vectorized with uint64 numpy arithmetic while
staying identical to the scalar recurrence.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF

_TWO53 = float(1 << 53)


def derive(seed: int, index: int) -> int:
    """Derive an independent sub-seed from (seed, index), e.g. per trial."""
    x = (seed * _GOLDEN + index * _MIX2 + _MIX1) & _MASK
    return int(_mix(np.uint64([x]))[0])


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Seeded splitmix64 stream with vectorized block output."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def u64(self, count: int) -> np.ndarray:
        """Next `count` raw 64-bit outputs as a uint64 array."""
        steps = (np.arange(1, count + 1, dtype=np.uint64) * np.uint64(_GOLDEN))
        block = _mix(np.uint64(self._state) + steps)
        self._state = (self._state + count * _GOLDEN) & _MASK
        return block

    def random(self, count: int) -> np.ndarray:
        """Uniform float64 samples in [0, 1) with 53-bit resolution."""
        return (self.u64(count) >> np.uint64(11)).astype(np.float64) / _TWO53

    def normal(self, count: int) -> np.ndarray:
        """Standard normal samples via the Box-Muller transform."""
        m = (count + 1) // 2
        # u1 in (0, 1] keeps log() finite
        u1 = ((self.u64(m) >> np.uint64(11)).astype(np.float64) + 1.0) / _TWO53
        u2 = self.random(m)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return out[:count]

    def normal_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.normal(rows * cols).reshape(rows, cols)

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = int(self.u64(1)[0])
            if x < limit:
                return x % n

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of range(n), by sorting one block of keys."""
        return np.argsort(self.u64(n), kind="stable")

    def sample_indices(self, n: int, k: int) -> np.ndarray:
        """k distinct indices from range(n): the first k of a key-sort shuffle."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} from {n} items")
        return self.permutation(n)[:k]
