"""Renyi divergence between finite probability mass functions.

Test-suite instrumentation: certifies numerically that the noise
distribution meets its zero-concentrated privacy bound. Never used on a
release path.
"""

import math
from typing import Sequence

import numpy as np


def renyi_divergence(p: Sequence[float], q: Sequence[float], alpha: float) -> float:
    """D_alpha(P || Q) = log(sum p^alpha * q^(1-alpha)) / (alpha - 1).

    `p` and `q` are mass functions on the same finite grid; `q` must be
    positive wherever `p` is. Points with zero `p` mass contribute nothing.

    Raises:
        ValueError: On alpha <= 1, length mismatch, negative mass, or a
            point where p > 0 but q == 0.
    """
    if alpha <= 1:
        raise ValueError("alpha must be greater than 1")
    pa = np.asarray(p, dtype=float)
    qa = np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError(f"support mismatch: {pa.shape} vs {qa.shape}")
    if (pa < 0).any() or (qa < 0).any():
        raise ValueError("mass functions must be nonnegative")
    mask = pa > 0
    if (qa[mask] == 0).any():
        raise ValueError("q must be positive wherever p is positive")
    log_terms = alpha * np.log(pa[mask]) + (1.0 - alpha) * np.log(qa[mask])
    # logsumexp, stabilized by the max term
    m = float(log_terms.max())
    total = m + math.log(float(np.exp(log_terms - m).sum()))
    return total / (alpha - 1.0)
