"""Pure-Python kernels: the import-time fallback for the compiled core.

Draw-for-draw identical to ``seqaug._native`` (the parity tests enforce it):
same xoshiro256** step, same rejection-sampled bounded draw, same
Fisher-Yates loops, and bit-pattern column copies.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

_MASK64 = (1 << 64) - 1
_TWO64 = 1 << 64
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


class Generator:
    """xoshiro256** 1.0 (Blackman & Vigna, 2018) over four explicit state words."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, w0: int, w1: int, w2: int, w3: int) -> None:
        self._s0 = w0 & _MASK64
        self._s1 = w1 & _MASK64
        self._s2 = w2 & _MASK64
        self._s3 = w3 & _MASK64

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        x = (s1 * 5) & _MASK64
        result = ((((x << 7) & _MASK64) | (x >> 57)) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) & _MASK64) | (s3 >> 19)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def next_double(self) -> float:
        # 53-bit mantissa uniform in [0, 1)
        return (self.next_u64() >> 11) * _INV_2_53

    def bounded(self, n: int) -> int:
        """Unbiased uniform in [0, n): reject draws >= 2^64 - (2^64 mod n)."""
        if n < 1:
            raise ValueError("bounded() requires n >= 1")
        rem = _TWO64 % n
        x = self.next_u64()
        if rem:
            bound = _TWO64 - rem
            while x >= bound:
                x = self.next_u64()
        return x % n

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n) via Fisher-Yates, descending index."""
        arr = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.bounded(i + 1)
            arr[i], arr[j] = arr[j], arr[i]
        return np.asarray(arr, dtype=np.int64)

    def address_subset(self, k: int, d: int) -> np.ndarray:
        """Uniform k-subset of range(d): partial Fisher-Yates, first k slots, sorted."""
        pool = list(range(d))
        for i in range(k):
            j = i + self.bounded(d - i)
            pool[i], pool[j] = pool[j], pool[i]
        sel = np.asarray(pool[:k], dtype=np.int64)
        sel.sort()
        return sel


def permute_columns(data: np.ndarray, pi: np.ndarray, addresses: np.ndarray) -> np.ndarray:
    """Gather selected columns through pi; all other columns copied bit-identically.

    Copies happen on the uint32 view so NaN payloads survive untouched.
    """
    out = data.copy()
    if addresses.size and data.shape[0]:
        src = data.view(np.uint32)
        out.view(np.uint32)[:, addresses] = src[np.ix_(pi, addresses)]
    return out
