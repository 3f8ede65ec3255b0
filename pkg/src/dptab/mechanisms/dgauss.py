"""The discrete Gaussian distribution and the vector noise mechanism.

The distribution over the integers with mass proportional to
exp(-x^2 / (2*sigma_sq)). Sampling is exact (integer arithmetic on a keyed
bit stream, see the kernel modules); the probability mass function here is
a float-valued convenience for tests and diagnostics and never influences a
draw.
"""

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

from dptab.mechanisms import backend

RationalLike = Union[Fraction, int, str, Decimal, float]

# Terms below this relative size cannot change a double-precision normalizer.
_NORMALIZER_RELATIVE_CUTOFF = 1e-17


def as_fraction(value: RationalLike) -> Fraction:
    """Exact rational from a decimal literal, Decimal, int, or Fraction.

    Strings and Decimals convert exactly (e.g. "0.0069" -> 69/10000); floats
    convert via their exact binary value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(Decimal(value))
    return Fraction(value)


@lru_cache(maxsize=256)
def _normalizer(num: int, den: int) -> float:
    sigma_sq = num / den
    total = 1.0
    y = 1
    while True:
        term = 2.0 * math.exp(-(y * y) / (2.0 * sigma_sq))
        total += term
        if term < _NORMALIZER_RELATIVE_CUTOFF * total:
            return total
        y += 1


@dataclass(frozen=True)
class DiscreteGaussian:
    """The centered discrete Gaussian with variance parameter `sigma_sq`."""

    sigma_sq: Fraction

    def __post_init__(self):
        sq = as_fraction(self.sigma_sq)
        if sq <= 0:
            raise ValueError("sigma_sq must be positive")
        object.__setattr__(self, "sigma_sq", sq)

    @classmethod
    def from_rho(cls, rho: RationalLike) -> "DiscreteGaussian":
        """The mechanism distribution for privacy-loss parameter rho: sigma_sq = 1/(2*rho)."""
        r = as_fraction(rho)
        if r <= 0:
            raise ValueError("rho must be positive")
        return cls(1 / (2 * r))

    def pmf(self, x: int) -> float:
        """Pr[X = x], with the normalizer summed to double-precision exhaustion."""
        sq = float(self.sigma_sq)
        return math.exp(-(x * x) / (2.0 * sq)) / _normalizer(
            self.sigma_sq.numerator, self.sigma_sq.denominator
        )

    def sample(self, stream) -> int:
        """One exact draw from the given bit stream."""
        return backend.sample_dgauss(
            stream, self.sigma_sq.numerator, self.sigma_sq.denominator
        )


def vector_discrete_gaussian(
    a: Sequence[int],
    rho: RationalLike,
    rng,
) -> List[int]:
    """Adds one exact discrete Gaussian draw per component of `a`.

    Each component receives independent noise from the distribution with
    sigma_sq = 1/(2*rho). `rng` is either a single stream (components drawn
    sequentially) or one stream per component (the engine keys one stream
    per released cell). Outputs are integers and may be negative; no
    clamping or consistency enforcement happens here.

    Raises:
        ValueError: If rho is not positive, or a per-component `rng` has the
            wrong length.
    """
    dist = DiscreteGaussian.from_rho(rho)
    if hasattr(rng, "getrandbits"):
        return [int(v) + dist.sample(rng) for v in a]
    streams = list(rng)
    if len(streams) != len(a):
        raise ValueError(
            f"got {len(streams)} streams for {len(a)} vector components"
        )
    return [int(v) + dist.sample(s) for v, s in zip(a, streams)]


@dataclass(frozen=True)
class NoisyVector:
    """Released integer values with parallel (group, variant, cell) labels."""

    values: Tuple[int, ...]
    labels: Tuple[tuple, ...]

    def __post_init__(self):
        if len(self.values) != len(self.labels):
            raise ValueError("values and labels must have equal length")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "labels", tuple(self.labels))
