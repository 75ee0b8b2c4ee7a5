"""In-memory two-party channel with round and byte instrumentation.

The parties advance in lockstep: a protocol step computes both parties'
outbound messages and trades them through exchange(), which models one
synchronized communication round.  One-directional send/recv is also
provided; there a round is charged whenever the blocking direction flips.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ChannelStats:
    rounds: int = 0
    bytes_sent: dict = field(default_factory=lambda: {0: 0, 1: 0})

    def copy(self) -> "ChannelStats":
        return ChannelStats(self.rounds, dict(self.bytes_sent))


class Channel:
    def __init__(self):
        self.stats = ChannelStats()
        self.transcript = []  # (round, direction, bytes_p0, bytes_p1)
        self._last_dir = None

    def exchange(self, payload0: bytes, payload1: bytes):
        """Simultaneous exchange; returns what each party receives."""
        self.stats.rounds += 1
        self.stats.bytes_sent[0] += len(payload0)
        self.stats.bytes_sent[1] += len(payload1)
        self._last_dir = None
        self.transcript.append((self.stats.rounds, "both", len(payload0), len(payload1)))
        return payload1, payload0

    def send(self, src: int, payload: bytes) -> bytes:
        """Blocking one-directional message from `src` to the other party."""
        if self._last_dir != src:
            self.stats.rounds += 1
            self._last_dir = src
        self.stats.bytes_sent[src] += len(payload)
        direction = "p0->p1" if src == 0 else "p1->p0"
        self.transcript.append((self.stats.rounds, direction,
                                len(payload) if src == 0 else 0,
                                len(payload) if src == 1 else 0))
        return payload

    def dump_transcript(self) -> str:
        lines = ["round direction bytes_p0 bytes_p1"]
        for rnd, direction, b0, b1 in self.transcript:
            lines.append(f"{rnd} {direction} {b0} {b1}")
        return "\n".join(lines) + "\n"


# Wire helpers: fixed little-endian encodings so byte counts are exact.

def pack_u64(arr) -> bytes:
    return np.ascontiguousarray(arr, dtype="<u8").tobytes()


def unpack_u64(data: bytes, shape=None) -> np.ndarray:
    arr = np.frombuffer(data, dtype="<u8").astype(np.uint64)
    return arr.reshape(shape) if shape is not None else arr


def pack_bits(bits) -> bytes:
    """Pack a flat 0/1 array MSB-first into ceil(n/8) bytes."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def unpack_bits(data: bytes, n: int) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=n)
