"""Sign extraction from additive shares via a binary carry-combine ladder.

The parties bit-decompose their own shares locally, compute generate/
propagate pairs with GF(2) triples, reduce them through a log-depth
combine tree to the carry into the top bit, and convert the resulting
boolean sign share back to the ring with a dabit.  Round structure:

  1 round   input AND layer (k-1 generate bits)
  ceil(log2(k-1)) rounds   combine tree
  1 round   dabit opening for the binary-to-arithmetic switch

Every round sends one bit-packed message per party; the closed forms below
reproduce the wire format byte for byte and are what the analytic cost
layer quotes.
"""

from __future__ import annotations

import math

import numpy as np

from .beaver import BitTriplePool, DaBitPool
from .channel import Channel, pack_bits, unpack_bits
from .ring import RING_BITS, bit_decompose

_ONE = np.uint64(1)


def _tree_and_counts(k: int):
    """AND gates per combine level for the carry over the k-1 low bits."""
    width = k - 1
    counts = []
    while width > 1:
        combines = width // 2
        final = width == 2
        counts.append(combines * 2 - (1 if final else 0))
        width = combines + (width % 2)
    return counts


def a2b_compare_rounds(ring_bits: int = RING_BITS) -> int:
    return 2 + math.ceil(math.log2(ring_bits))


def a2b_compare_round_bits(ring_bits: int = RING_BITS):
    """Bits sent per element per party, one entry per round."""
    return ([2 * (ring_bits - 1)]
            + [2 * ands for ands in _tree_and_counts(ring_bits)]
            + [1])


def a2b_compare_wire_bytes(elems: int, ring_bits: int = RING_BITS) -> int:
    """Exact per-party online bytes: each round is one bit-packed message."""
    return sum(math.ceil(bits * elems / 8) for bits in a2b_compare_round_bits(ring_bits))


def compare_and_gates(elems: int, ring_bits: int = RING_BITS) -> int:
    return elems * ((ring_bits - 1) + sum(_tree_and_counts(ring_bits)))


def _and_layer(x0, x1, y0, y1, triples: BitTriplePool, channel: Channel):
    """GF(2) multiply of boolean-shared arrays; one exchange round."""
    shape = x0.shape
    n = x0.size
    a0, b0, c0, a1, b1, c1 = (p.reshape(shape) for p in triples.take(n))
    d0, e0 = x0 ^ a0, y0 ^ b0
    d1, e1 = x1 ^ a1, y1 ^ b1
    msg0 = pack_bits(np.concatenate([d0.ravel(), e0.ravel()]))
    msg1 = pack_bits(np.concatenate([d1.ravel(), e1.ravel()]))
    recv0, recv1 = channel.exchange(msg0, msg1)
    from1 = unpack_bits(recv0, 2 * n)
    d = (d0.ravel() ^ from1[:n]).reshape(shape)
    e = (e0.ravel() ^ from1[n:]).reshape(shape)
    z0 = c0 ^ (d & b0) ^ (e & a0) ^ (d & e)
    z1 = c1 ^ (d & b1) ^ (e & a1)
    return z0, z1


def a2b_compare(x0, x1, channel: Channel, supplies):
    """Arithmetic shares of [x < 0] for x = x0 + x1 mod 2^64 (signed msb).

    supplies is a dealer CompareSupplies bundle; its triple pool must hold
    compare_and_gates(len(x)) GF(2) triples and len(x) dabits.
    """
    x0 = np.atleast_1d(np.asarray(x0, np.uint64))
    x1 = np.atleast_1d(np.asarray(x1, np.uint64))
    k = RING_BITS
    bits0 = bit_decompose(x0, k)
    bits1 = bit_decompose(x1, k)
    low0, low1 = bits0[:, :k - 1], bits1[:, :k - 1]
    zeros = np.zeros_like(low0)

    # generate bits g_i = (share0 bit i) AND (share1 bit i); propagate bits
    # are xor-shared for free
    g0, g1 = _and_layer(low0, zeros, zeros, low1, supplies.bit_triples, channel)
    p0, p1 = low0, low1

    while g0.shape[1] > 1:
        width = g0.shape[1]
        pairs = width // 2
        lo = slice(0, 2 * pairs, 2)
        hi = slice(1, 2 * pairs, 2)
        final = width == 2
        if final:
            pg0, pg1 = _and_layer(p0[:, hi], p1[:, hi], g0[:, lo], g1[:, lo],
                                  supplies.bit_triples, channel)
            g0 = g0[:, hi] ^ pg0
            g1 = g1[:, hi] ^ pg1
            p0 = p0[:, hi]
            p1 = p1[:, hi]
            continue
        # one exchange for both products: (p_hi & g_lo) and (p_hi & p_lo)
        lhs0 = np.concatenate([p0[:, hi], p0[:, hi]], axis=1)
        lhs1 = np.concatenate([p1[:, hi], p1[:, hi]], axis=1)
        rhs0 = np.concatenate([g0[:, lo], p0[:, lo]], axis=1)
        rhs1 = np.concatenate([g1[:, lo], p1[:, lo]], axis=1)
        prod0, prod1 = _and_layer(lhs0, lhs1, rhs0, rhs1,
                                  supplies.bit_triples, channel)
        new_g0 = g0[:, hi] ^ prod0[:, :pairs]
        new_g1 = g1[:, hi] ^ prod1[:, :pairs]
        new_p0 = prod0[:, pairs:]
        new_p1 = prod1[:, pairs:]
        if width % 2:
            new_g0 = np.concatenate([new_g0, g0[:, -1:]], axis=1)
            new_g1 = np.concatenate([new_g1, g1[:, -1:]], axis=1)
            new_p0 = np.concatenate([new_p0, p0[:, -1:]], axis=1)
            new_p1 = np.concatenate([new_p1, p1[:, -1:]], axis=1)
        g0, g1, p0, p1 = new_g0, new_g1, new_p0, new_p1

    carry0, carry1 = g0[:, 0], g1[:, 0]
    sign0 = bits0[:, k - 1] ^ carry0
    sign1 = bits1[:, k - 1] ^ carry1

    # binary -> arithmetic with a dabit: open z = sign ^ r, then
    # [sign] = z + [r] - 2 z [r]
    rb0, rb1, ra0, ra1 = supplies.dabits.take(x0.shape[0])
    z0 = sign0 ^ rb0
    z1 = sign1 ^ rb1
    recv0, recv1 = channel.exchange(pack_bits(z0), pack_bits(z1))
    z = (z0 ^ unpack_bits(recv0, z0.size)).astype(np.uint64)
    z_check = (z1 ^ unpack_bits(recv1, z1.size)).astype(np.uint64)
    assert np.array_equal(z, z_check)
    two_z = np.uint64(2) * z
    out0 = z + ra0 - two_z * ra0
    out1 = ra1 - two_z * ra1
    return out0, out1
