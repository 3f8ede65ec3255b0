"""Deterministic keyed random streams.

A 64-bit master seed plus a tuple of key parts (level index, table class,
group identifiers, cell label, ...) derives an independent counter-based
stream. Derivation is order-safe: parallel and sequential execution over
the same keys produce bit-identical draws, and no shared mutable state is
involved.
"""

import hashlib
from typing import Union

from dptab.mechanisms import backend

_DOMAIN_TAG = b"dptab.noise.v1"

KeyPart = Union[str, int]


class NoiseStreams:
    """Factory of independent bit streams keyed by (master seed, parts)."""

    def __init__(self, master_seed: int):
        if not 0 <= master_seed < 2**64:
            raise ValueError("master seed must be an unsigned 64-bit integer")
        self._seed = master_seed

    @property
    def master_seed(self) -> int:
        return self._seed

    def stream(self, *parts: KeyPart):
        """A fresh stream for this key; identical keys replay identical bits."""
        h = hashlib.sha256()
        h.update(_DOMAIN_TAG)
        h.update(self._seed.to_bytes(8, "big"))
        for part in parts:
            raw = str(part).encode("utf-8")
            h.update(len(raw).to_bytes(4, "big"))
            h.update(raw)
        return backend.BitStream(h.digest())
