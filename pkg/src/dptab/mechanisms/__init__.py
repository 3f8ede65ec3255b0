"""Exact discrete Gaussian noise: distribution, vector mechanism, keyed streams.

The sampling kernel is compiled when the extension was built and pure
Python otherwise; see `dptab.mechanisms.backend`.
"""

from dptab.mechanisms.backend import BACKEND, kernels
from dptab.mechanisms.dgauss import (
    DiscreteGaussian,
    NoisyVector,
    as_fraction,
    vector_discrete_gaussian,
)
from dptab.mechanisms.renyi import renyi_divergence
from dptab.mechanisms.rng import NoiseStreams

__all__ = [
    "BACKEND",
    "DiscreteGaussian",
    "NoiseStreams",
    "NoisyVector",
    "as_fraction",
    "kernels",
    "renyi_divergence",
    "vector_discrete_gaussian",
]
