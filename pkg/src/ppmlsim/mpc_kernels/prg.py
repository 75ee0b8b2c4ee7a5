"""Batched pseudorandom expansion for the tree-based function shares.

A fixed-key AES-128 in a Matyas-Meyer-Oseas arrangement expands a 128-bit
seed into as many 128-bit blocks as a node needs: block_t = E_K(s ^ w_t) ^
(s ^ w_t) with per-position tweaks w_t.  Batch inputs are encrypted in one
ECB pass so whole-level expansions cost a single cipher call.  Desk-scale
use only; the fixed key is public by construction.
"""

from __future__ import annotations

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

_FIXED_KEY = bytes.fromhex("243f6a8885a308d313198a2e03707344")  # public constant
_CIPHER = Cipher(algorithms.AES(_FIXED_KEY), modes.ECB())

# Distinct tweaks for up to 8 output blocks per expansion.
_TWEAKS = np.arange(1, 9, dtype=np.uint64) * np.uint64(0x9E3779B97F4A7C15)


def expand(seeds: np.ndarray, n_blocks: int) -> np.ndarray:
    """(E, 2) uint64 seeds -> (E, n_blocks, 2) uint64 pseudorandom blocks."""
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64).reshape(-1, 2)
    n = seeds.shape[0]
    inp = np.repeat(seeds[:, None, :], n_blocks, axis=1)
    inp[:, :, 0] ^= _TWEAKS[:n_blocks]
    flat = np.ascontiguousarray(inp)
    out = _CIPHER.encryptor().update(flat.tobytes())
    out_arr = np.frombuffer(out, dtype=np.uint64).reshape(n, n_blocks, 2)
    return out_arr ^ flat


def seeds_from_rng(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.integers(0, 1 << 64, size=(count, 2), dtype=np.uint64)
