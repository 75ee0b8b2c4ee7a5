"""Z_{2^64} arithmetic on numpy uint64 plus the fixed-point embedding."""

from __future__ import annotations

import numpy as np

RING_BITS = 64
RING_MASK = (1 << RING_BITS) - 1
FRACTION_BITS = 16
_SCALE = 1 << FRACTION_BITS
_HALF = 1 << (RING_BITS - 1)


def as_ring(x) -> np.ndarray:
    """Coerce ints/arrays into uint64 ring elements (wrapping)."""
    arr = np.asarray(x)
    if arr.dtype == np.uint64:
        return arr
    return (arr.astype(object) & RING_MASK if arr.dtype == object
            else np.asarray(arr, dtype=np.int64).astype(np.uint64))


def rand_ring(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.integers(0, 1 << 64, size=shape, dtype=np.uint64)


def to_signed(u) -> np.ndarray:
    """Reinterpret ring elements as signed two's-complement values."""
    return np.asarray(u, dtype=np.uint64).astype(np.int64)


def encode_fixed(x) -> np.ndarray:
    """Embed reals as ring elements with FRACTION_BITS fractional bits."""
    return np.round(np.asarray(x, dtype=np.float64) * _SCALE).astype(
        np.int64).astype(np.uint64)


def decode_fixed(u) -> np.ndarray:
    return to_signed(u).astype(np.float64) / _SCALE


def truncate_share(value: np.ndarray, party: int, bits: int = FRACTION_BITS) -> np.ndarray:
    """Local share truncation after a fixed-point multiply.

    Party 0 shifts down; party 1 shifts the negation so the shares still sum
    to roughly x >> bits.  The usual probabilistic off-by-one in the low bit
    (and a wraparound failure when |x| approaches the ring modulus) is
    accepted.
    """
    value = np.asarray(value, dtype=np.uint64)
    if party == 0:
        return value >> np.uint64(bits)
    neg = (~value + np.uint64(1))
    return ~(neg >> np.uint64(bits)) + np.uint64(1)


def bit_decompose(value: np.ndarray, bits: int = RING_BITS) -> np.ndarray:
    """(..., bits) uint8 array of little-endian bits."""
    value = np.asarray(value, dtype=np.uint64)
    shifts = np.arange(bits, dtype=np.uint64)
    return ((value[..., None] >> shifts) & np.uint64(1)).astype(np.uint8)
