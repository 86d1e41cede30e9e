"""MT19937 Mersenne Twister (32-bit output), twist vectorised with numpy."""
from __future__ import annotations

import numpy as np

N = 624
M = 397
MATRIX_A = np.uint32(0x9908B0DF)
UPPER_MASK = np.uint32(0x80000000)
LOWER_MASK = np.uint32(0x7FFFFFFF)
DEFAULT_SEED = 5489


def init_genrand(seed: int) -> np.ndarray:
    mt = [0] * N
    mt[0] = seed & 0xFFFFFFFF
    for i in range(1, N):
        prev = mt[i - 1]
        mt[i] = (1812433253 * (prev ^ (prev >> 30)) + i) & 0xFFFFFFFF
    return np.array(mt, dtype=np.uint32)


def _twist_range(mt: np.ndarray, lo: int, hi: int) -> None:
    i = np.arange(lo, hi)
    y = (mt[i] & UPPER_MASK) | (mt[(i + 1) % N] & LOWER_MASK)
    mag = np.where(y & np.uint32(1), MATRIX_A, np.uint32(0))
    mt[i] = mt[(i + M) % N] ^ (y >> np.uint32(1)) ^ mag


def twist(mt: np.ndarray) -> None:
    """Regenerate all 624 words in place.

    Word i reads words i+1 and i+397 (mod 624); chunk boundaries are chosen so
    every read sees the same (old or already-updated) value as the serial loop.
    """
    _twist_range(mt, 0, N - M)  # reads untouched 397..623
    _twist_range(mt, N - M, 2 * (N - M))  # reads fresh 0..226
    _twist_range(mt, 2 * (N - M), N - 1)  # reads fresh 227..395
    _twist_range(mt, N - 1, N)  # reads fresh mt[0], mt[396]


def temper(y: np.ndarray) -> np.ndarray:
    y = y ^ (y >> np.uint32(11))
    y = y ^ ((y << np.uint32(7)) & np.uint32(0x9D2C5680))
    y = y ^ ((y << np.uint32(15)) & np.uint32(0xEFC60000))
    return y ^ (y >> np.uint32(18))


class MT19937:
    """Mersenne Twister with ``init_genrand`` seeding.

    >>> MT19937(5489).next_word()
    3499211612
    """

    def __init__(self, seed: int = DEFAULT_SEED):
        if seed < 0:
            raise ValueError("seed must be an unsigned 32-bit integer")
        self.seed = int(seed) & 0xFFFFFFFF
        self.state = init_genrand(self.seed)
        self.index = N
        self._out = np.empty(0, dtype=np.uint32)

    def _refill(self) -> None:
        twist(self.state)
        self._out = temper(self.state)
        self.index = 0

    def next_word(self) -> int:
        if self.index >= N:
            self._refill()
        w = self._out[self.index]
        self.index += 1
        return int(w)

    def words(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint32)
        filled = 0
        while filled < n:
            if self.index >= N:
                self._refill()
            take = min(n - filled, N - self.index)
            out[filled:filled + take] = self._out[self.index:self.index + take]
            self.index += take
            filled += take
        return out

    def next_unit(self) -> float:
        return self.next_word() / 4294967296.0

    def units(self, n: int) -> np.ndarray:
        return self.words(n) / 4294967296.0
