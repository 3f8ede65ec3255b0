"""Pure-Python noise kernel: deterministic bit stream and exact sampler.

The compiled kernel in ``_kernel_cy`` mirrors this module operation for
operation; both consume the underlying bit stream identically, so a fixed
key yields the same draws regardless of which kernel is active.

All sampling is exact: every random choice reduces to uniform integers from
the keyed bit stream and integer arithmetic on numerator/denominator pairs.
No floating-point value ever influences a draw.
"""

import hashlib
from math import isqrt

BACKEND = "python"


class BitStream:
    """Counter-mode SHA-256 bit stream.

    Blocks are SHA-256(key || counter), consumed low bits first so the
    consumption pattern is independent of request sizes.
    """

    __slots__ = ("_key", "_counter", "_buf", "_nbits")

    def __init__(self, key: bytes):
        self._key = bytes(key)
        self._counter = 0
        self._buf = 0
        self._nbits = 0

    def getrandbits(self, k: int) -> int:
        buf = self._buf
        nbits = self._nbits
        while nbits < k:
            block = hashlib.sha256(
                self._key + self._counter.to_bytes(8, "big")
            ).digest()
            self._counter += 1
            buf |= int.from_bytes(block, "big") << nbits
            nbits += 256
        self._buf = buf >> k
        self._nbits = nbits - k
        return buf & ((1 << k) - 1)

    def randbelow(self, m: int) -> int:
        # Uniform over range(m) by rejection on (m-1).bit_length() bits.
        if m <= 1:
            return 0
        k = (m - 1).bit_length()
        r = self.getrandbits(k)
        while r >= m:
            r = self.getrandbits(k)
        return r


def _bernoulli(stream, num, den):
    # Bernoulli(num/den), 0 <= num <= den.
    return stream.randbelow(den) < num


def _bernoulli_exp1(stream, num, den):
    # Bernoulli(exp(-num/den)) for num <= den, via the alternating-series
    # acceptance trick: count how many Bernoulli(x/k) successes chain up.
    k = 1
    while _bernoulli(stream, num, den * k):
        k += 1
    return k & 1


def _bernoulli_exp(stream, num, den):
    # Bernoulli(exp(-num/den)) for any num >= 0.
    while num > den:
        if not _bernoulli_exp1(stream, 1, 1):
            return 0
        num -= den
    return _bernoulli_exp1(stream, num, den)


def _geometric_exp_slow(stream, num, den):
    # Geometric(1 - exp(-num/den)): number of consecutive successes.
    k = 0
    while _bernoulli_exp(stream, num, den):
        k += 1
    return k


def _geometric_exp_fast(stream, num, den):
    # Geometric(1 - exp(-num/den)) in expected time independent of the value.
    if num == 0:
        return 0
    while True:
        u = stream.randbelow(den)
        if _bernoulli_exp(stream, u, den):
            break
    v = _geometric_exp_slow(stream, 1, 1)
    return (v * den + u) // num


def _discrete_laplace(stream, scale):
    # Two-sided geometric with Pr[x] proportional to exp(-|x|/scale).
    while True:
        sign = stream.getrandbits(1)
        magnitude = _geometric_exp_fast(stream, 1, scale)
        if sign and magnitude == 0:
            continue
        return -magnitude if sign else magnitude


def sample_dgauss(stream, sigma_sq_num: int, sigma_sq_den: int) -> int:
    """One exact draw with Pr[x] proportional to exp(-x^2 / (2*sigma_sq)).

    Rejection from a discrete Laplace whose scale is floor(sigma) + 1; the
    acceptance test is an exact Bernoulli(exp(-gamma)) trial on the rational
    residual gamma = (|y| - sigma_sq/t)^2 / (2*sigma_sq).
    """
    if sigma_sq_num <= 0 or sigma_sq_den <= 0:
        raise ValueError("sigma_sq must be positive")
    t = isqrt(sigma_sq_num // sigma_sq_den) + 1
    # gamma = d^2 / bias_den with d = |y|*sigma_sq_den*t - sigma_sq_num.
    bias_den = 2 * sigma_sq_num * sigma_sq_den * t * t
    st = sigma_sq_den * t
    while True:
        y = _discrete_laplace(stream, t)
        d = abs(y) * st - sigma_sq_num
        if _bernoulli_exp(stream, d * d, bias_den):
            return y
