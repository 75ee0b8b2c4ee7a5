"""One-round rectifier gate built on comparison function shares.

The dealer fixes a random mask r per element and hands each party shares
of r, two comparison keys with payload (1, r), and shares of the interval
wrap constants.  Online, the parties reveal u = x + r (one exchange, one
ring element per element per party) and everything else is local: with
s = r and t = r + 2^63,

    [x >= 0] = 1{u < t} - 1{u < s} + 1{r >= 2^63}
    relu(x)  = u * [x >= 0] - [r * [x >= 0]]

both right-hand sides coming out of the payload evaluations.  Keys are
single use; a second invocation with the same bundle is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beaver import ReuseError
from .channel import Channel, pack_u64, unpack_u64
from .fss import _KeyBatch, eval_batch

_HALF = np.uint64(1) << np.uint64(63)


@dataclass
class ReluKeys:
    """Per-party key bundle for a vector of rectifier gates."""

    party: int
    r_share: np.ndarray       # additive share of the mask
    w_share: np.ndarray       # share of 1{r >= 2^63}
    wr_share: np.ndarray      # share of r * 1{r >= 2^63}
    dcf_low: _KeyBatch        # alpha = r,         payload (1, r)
    dcf_high: _KeyBatch       # alpha = r + 2^63,  payload (1, r)
    _state: dict = None       # shared between the two parties' bundles

    def __len__(self):
        return self.r_share.shape[0]

    @property
    def consumed(self) -> bool:
        return self._state["used"]


def fss_relu(x0, x1, keys0: ReluKeys, keys1: ReluKeys, channel: Channel):
    """max(x, 0) on additive shares; exactly one online round."""
    x0 = np.atleast_1d(np.asarray(x0, np.uint64))
    x1 = np.atleast_1d(np.asarray(x1, np.uint64))
    if keys0._state is not keys1._state:
        raise ValueError("relu key bundles are not a matching pair")
    if keys0.consumed:
        raise ReuseError("relu keys already consumed")
    keys0._state["used"] = True
    if x0.shape[0] != len(keys0):
        raise ValueError(f"{x0.shape[0]} elements but keys for {len(keys0)}")

    u0 = x0 + keys0.r_share
    u1 = x1 + keys1.r_share
    recv0, recv1 = channel.exchange(pack_u64(u0), pack_u64(u1))
    u = u0 + unpack_u64(recv0)
    assert np.array_equal(u, u1 + unpack_u64(recv1))

    outs = []
    for keys in (keys0, keys1):
        hi = eval_batch(keys.dcf_high, u)
        lo = eval_batch(keys.dcf_low, u)
        ind = hi[:, 0] - lo[:, 0] + keys.w_share
        r_ind = hi[:, 1] - lo[:, 1] + keys.wr_share
        outs.append(u * ind - r_ind)
    return outs[0], outs[1]
