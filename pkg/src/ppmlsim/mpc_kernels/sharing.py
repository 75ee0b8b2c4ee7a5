"""Additive two-party sharing over Z_{2^64}."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ring import as_ring, rand_ring


@dataclass
class Share:
    """One party's additive share; value may be a scalar or an array."""
    value: np.ndarray
    party: int

    def __post_init__(self):
        if self.party not in (0, 1):
            raise ValueError("party must be 0 or 1")
        self.value = np.asarray(self.value, dtype=np.uint64)


def share(x, rng: np.random.Generator):
    """Split x into two shares whose marginal distributions are uniform."""
    x = as_ring(x)
    r = rand_ring(rng, np.shape(x))
    return Share(r, 0), Share(x - r, 1)


def reconstruct(s0: Share, s1: Share) -> np.ndarray:
    if {s0.party, s1.party} != {0, 1}:
        raise ValueError("need one share from each party")
    return s0.value + s1.value
