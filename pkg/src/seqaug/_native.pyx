# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: xoshiro256** draws, Fisher-Yates sampling, column gather.

Must stay draw-for-draw identical to ``seqaug._pykernels``; the parity tests
enforce equality on every primitive.
"""

from libc.stdint cimport int64_t, uint32_t, uint64_t
from libc.string cimport memcpy

import numpy as np

NAME = "native"

DEF INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef class Generator:
    """xoshiro256** 1.0 (Blackman & Vigna, 2018) over four explicit state words."""

    cdef uint64_t s0, s1, s2, s3

    def __cinit__(self, w0, w1, w2, w3):
        self.s0 = <uint64_t>w0
        self.s1 = <uint64_t>w1
        self.s2 = <uint64_t>w2
        self.s3 = <uint64_t>w3

    cdef uint64_t _next(self) nogil:
        cdef uint64_t result = _rotl(self.s1 * 5UL, 7) * 9UL
        cdef uint64_t t = self.s1 << 17
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _rotl(self.s3, 45)
        return result

    cdef uint64_t _bounded(self, uint64_t n) nogil:
        # Unbiased uniform in [0, n): reject draws >= 2^64 - (2^64 mod n).
        cdef uint64_t rem = (<uint64_t>0 - n) % n
        cdef uint64_t bound = <uint64_t>0 - rem
        cdef uint64_t x = self._next()
        if rem != 0:
            while x >= bound:
                x = self._next()
        return x % n

    def next_u64(self):
        return self._next()

    def next_double(self):
        # 53-bit mantissa uniform in [0, 1)
        return <double>(self._next() >> 11) * INV_2_53

    def bounded(self, n):
        if n < 1:
            raise ValueError("bounded() requires n >= 1")
        return self._bounded(<uint64_t>n)

    def permutation(self, n):
        """Uniform permutation of range(n) via Fisher-Yates, descending index."""
        out = np.arange(n, dtype=np.int64)
        cdef int64_t[::1] v = out
        cdef Py_ssize_t i, j
        cdef int64_t tmp
        cdef Py_ssize_t size = n
        with nogil:
            for i in range(size - 1, 0, -1):
                j = <Py_ssize_t>self._bounded(<uint64_t>(i + 1))
                tmp = v[i]
                v[i] = v[j]
                v[j] = tmp
        return out

    def address_subset(self, k, d):
        """Uniform k-subset of range(d): partial Fisher-Yates, first k slots, sorted."""
        pool = np.arange(d, dtype=np.int64)
        cdef int64_t[::1] v = pool
        cdef Py_ssize_t i, j
        cdef int64_t tmp
        cdef Py_ssize_t kk = k
        cdef Py_ssize_t dd = d
        with nogil:
            for i in range(kk):
                j = i + <Py_ssize_t>self._bounded(<uint64_t>(dd - i))
                tmp = v[i]
                v[i] = v[j]
                v[j] = tmp
        sel = pool[:kk].copy()
        sel.sort()
        return sel


def permute_columns(data, pi, addresses):
    """Gather selected columns through pi; all other columns copied bit-identically.

    One pass per output row: copy the row, then overwrite selected cells from
    the permuted source row. Copies happen on the uint32 view so NaN payloads
    survive untouched.
    """
    cdef Py_ssize_t T = data.shape[0]
    cdef Py_ssize_t d = data.shape[1]
    cdef Py_ssize_t k = addresses.shape[0]
    if T == 0 or k == 0:
        return data.copy()
    out = np.empty_like(data)
    cdef const uint32_t[:, ::1] src = data.view(np.uint32)
    cdef uint32_t[:, ::1] dst = out.view(np.uint32)
    cdef const int64_t[::1] perm = pi
    cdef const int64_t[::1] addr = addresses
    cdef Py_ssize_t t, j, s, a
    with nogil:
        for t in range(T):
            memcpy(&dst[t, 0], &src[t, 0], <size_t>d * sizeof(uint32_t))
            s = <Py_ssize_t>perm[t]
            if s != t:
                for j in range(k):
                    a = <Py_ssize_t>addr[j]
                    dst[t, a] = src[s, a]
    return out
