# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled noise kernel mirroring ``_kernel_py`` operation for operation.

Every random primitive consumes the keyed bit stream exactly as the pure
kernel does, so both kernels produce identical draws for identical keys.
Arithmetic runs on C integers when values provably fit and falls back to
Python integers otherwise; the fallback cannot change which bits are
consumed because consumption depends only on the rational values involved.
"""

import hashlib
from math import isqrt

from libc.stdint cimport uint64_t

BACKEND = "cython"

# den * k in the Bernoulli(exp(-x)) inner loop stays below 2^63 for
# den <= 2^48 and k <= 2^15; beyond either bound we continue in objects.
DEF U48 = 0xFFFFFFFFFFFF
DEF KMAX = 0x7FFF


cdef int _bitlen_u64(uint64_t x):
    cdef int n = 0
    while x:
        x >>= 1
        n += 1
    return n


cdef class BitStream:
    """Counter-mode SHA-256 bit stream; low bits of each block come out first."""

    cdef object _key
    cdef uint64_t _counter
    cdef uint64_t _w
    cdef int _m
    cdef bytes _block
    cdef int _chunk

    def __init__(self, key):
        self._key = bytes(key)
        self._counter = 0
        self._w = 0
        self._m = 0
        self._block = b""
        self._chunk = 4

    cdef uint64_t _next_word(self):
        # 64-bit words in low-to-high order of the 256-bit block integer.
        cdef const unsigned char* p
        cdef uint64_t x = 0
        cdef int base, i
        if self._chunk >= 4:
            self._block = hashlib.sha256(
                self._key + int(self._counter).to_bytes(8, "big")
            ).digest()
            self._counter += 1
            self._chunk = 0
        base = 24 - 8 * self._chunk
        p = self._block
        for i in range(8):
            x = (x << 8) | p[base + i]
        self._chunk += 1
        return x

    cdef uint64_t _bits63(self, int k):
        cdef uint64_t r = 0
        cdef int have = 0, t
        while have < k:
            if self._m == 0:
                self._w = self._next_word()
                self._m = 64
            t = k - have
            if t > self._m:
                t = self._m
            r |= (self._w & ((<uint64_t>1 << t) - 1)) << have
            self._w >>= t
            self._m -= t
            have += t
        return r

    cdef uint64_t _randbelow_u64(self, uint64_t m):
        # m >= 2 and m - 1 fits in 63 bits.
        cdef int k = _bitlen_u64(m - 1)
        cdef uint64_t r = self._bits63(k)
        while r >= m:
            r = self._bits63(k)
        return r

    cpdef object getrandbits(self, object k):
        cdef long kk = k
        cdef long t, shift
        if kk <= 0:
            return 0
        if kk <= 63:
            return self._bits63(<int>kk)
        res = 0
        shift = 0
        while kk > 0:
            t = 63 if kk > 63 else kk
            res |= <object>self._bits63(<int>t) << shift
            shift += t
            kk -= t
        return res

    cpdef object randbelow(self, object m):
        if m <= 1:
            return 0
        if m <= <uint64_t>0x7FFFFFFFFFFFFFFF:
            return self._randbelow_u64(<uint64_t>m)
        k = (m - 1).bit_length()
        r = self.getrandbits(k)
        while r >= m:
            r = self.getrandbits(k)
        return r


cdef int _bernoulli(BitStream s, object num, object den):
    cdef uint64_t n64, d64
    if den <= <uint64_t>0x7FFFFFFFFFFFFFFF:
        d64 = den
        n64 = num
        return s._randbelow_u64(d64) < n64 if d64 > 1 else 0 < n64
    return s.randbelow(den) < num


cdef int _bernoulli_exp1(BitStream s, object num, object den):
    # Bernoulli(exp(-num/den)), num <= den.
    cdef uint64_t n64, d64, k64
    if num <= U48 and den <= U48:
        n64 = num
        d64 = den
        k64 = 1
        while k64 <= KMAX:
            if d64 * k64 > 1:
                if s._randbelow_u64(d64 * k64) >= n64:
                    return <int>(k64 & 1)
            else:
                if n64 < 1:
                    return <int>(k64 & 1)
            k64 += 1
        k = int(k64)
    else:
        k = 1
    while _bernoulli(s, num, den * k):
        k += 1
    return k & 1


cdef int _bernoulli_exp(BitStream s, object num, object den):
    while num > den:
        if not _bernoulli_exp1(s, 1, 1):
            return 0
        num = num - den
    return _bernoulli_exp1(s, num, den)


cdef object _geometric_exp_slow(BitStream s, object num, object den):
    cdef uint64_t k = 0
    while _bernoulli_exp(s, num, den):
        k += 1
    return k


cdef object _geometric_exp_fast(BitStream s, object num, object den):
    if num == 0:
        return 0
    while True:
        u = s.randbelow(den)
        if _bernoulli_exp(s, u, den):
            break
    v = _geometric_exp_slow(s, 1, 1)
    return (v * den + u) // num


cdef object _discrete_laplace(BitStream s, object scale):
    cdef int sign
    while True:
        sign = <int>s._bits63(1)
        magnitude = _geometric_exp_fast(s, 1, scale)
        if sign and magnitude == 0:
            continue
        return -magnitude if sign else magnitude


def sample_dgauss(BitStream stream, sigma_sq_num, sigma_sq_den):
    """One exact draw with Pr[x] proportional to exp(-x^2 / (2*sigma_sq))."""
    if sigma_sq_num <= 0 or sigma_sq_den <= 0:
        raise ValueError("sigma_sq must be positive")
    t = isqrt(sigma_sq_num // sigma_sq_den) + 1
    bias_den = 2 * sigma_sq_num * sigma_sq_den * t * t
    st = sigma_sq_den * t
    while True:
        y = _discrete_laplace(stream, t)
        d = abs(y) * st - sigma_sq_num
        if _bernoulli_exp(stream, d * d, bias_den):
            return y
