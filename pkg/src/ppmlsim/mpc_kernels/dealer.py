"""Trusted in-process dealer for all correlated randomness.

Semi-honest preprocessing model: the dealer samples everything from a
seeded generator (identical seeds give identical material and therefore
identical transcripts) and tracks how many bytes it would have shipped to
each party, which is what the offline-traffic accounting in the analytic
layer corresponds to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beaver import BeaverTriple, BitTriplePool, DaBitPool
from .compare import compare_and_gates
from .fss import dcf_key_bytes, keygen_batch
from .relu import ReluKeys
from .ring import rand_ring

_HALF = np.uint64(1) << np.uint64(63)


@dataclass
class CompareSupplies:
    bit_triples: BitTriplePool
    dabits: DaBitPool


class Dealer:
    def __init__(self, seed=0):
        self.rng = np.random.default_rng(seed)
        self.bytes_shipped = {0: 0, 1: 0}

    def _ship(self, per_party_bytes: float):
        self.bytes_shipped[0] += int(per_party_bytes)
        self.bytes_shipped[1] += int(per_party_bytes)

    def triple(self, shape) -> BeaverTriple:
        """Multiplication triple shares over Z_{2^64}."""
        rng = self.rng
        a, b = rand_ring(rng, shape), rand_ring(rng, shape)
        c = a * b
        a0, b0, c0 = rand_ring(rng, shape), rand_ring(rng, shape), rand_ring(rng, shape)
        n = int(np.prod(shape)) if shape else 1
        self._ship(3 * 8 * n)
        return BeaverTriple(a0, b0, c0, a - a0, b - b0, c - c0)

    def bit_triples(self, count: int) -> BitTriplePool:
        rng = self.rng
        bits = lambda: rng.integers(0, 2, size=count, dtype=np.uint8)
        a, b = bits(), bits()
        c = a & b
        a0, b0, c0 = bits(), bits(), bits()
        self._ship(3 * count / 8)
        return BitTriplePool(a0, b0, c0, a ^ a0, b ^ b0, c ^ c0)

    def dabits(self, count: int) -> DaBitPool:
        rng = self.rng
        r = rng.integers(0, 2, size=count, dtype=np.uint8)
        rb0 = rng.integers(0, 2, size=count, dtype=np.uint8)
        ra0 = rand_ring(rng, count)
        self._ship(count / 8 + 8 * count)
        return DaBitPool(rb0, r ^ rb0, ra0, r.astype(np.uint64) - ra0)

    def compare_supplies(self, elems: int) -> CompareSupplies:
        return CompareSupplies(self.bit_triples(compare_and_gates(elems)),
                               self.dabits(elems))

    def relu_keys(self, elems: int):
        """Mask + comparison-key bundles for a vector of rectifier gates."""
        rng = self.rng
        r = rand_ring(rng, elems)
        beta = np.stack([np.ones(elems, np.uint64), r], axis=1)
        low0, low1 = keygen_batch("dcf", r, beta, 64, rng, payload_words=2)
        high0, high1 = keygen_batch("dcf", r + _HALF, beta, 64, rng, payload_words=2)
        w = (r >= _HALF).astype(np.uint64)
        wr = w * r
        r0 = rand_ring(rng, elems)
        w0 = rand_ring(rng, elems)
        wr0 = rand_ring(rng, elems)
        state = {"used": False}
        k0 = ReluKeys(0, r0, w0, wr0, low0, high0, state)
        k1 = ReluKeys(1, r - r0, w - w0, wr - wr0, low1, high1, state)
        self._ship(elems * (3 * 8 + 2 * dcf_key_bytes(64, payload_words=2)))
        return k0, k1
