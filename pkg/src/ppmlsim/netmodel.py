"""Analytical network pricing: rounds cost RTT, bytes cost bandwidth.

One protocol round is billed as one full round trip (request/response pair).
Offline and online traffic share the same link and are serialized FIFO;
overlap policies live in the simulation layer, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class NetworkConfig:
    name: str
    rtt_s: float
    bandwidth_Bps: float

    def __post_init__(self):
        if not (self.rtt_s >= 0 and math.isfinite(self.rtt_s)):
            raise ValueError(f"rtt_s must be finite and >= 0, got {self.rtt_s}")
        if not (self.bandwidth_Bps > 0 and math.isfinite(self.bandwidth_Bps)):
            raise ValueError(
                f"bandwidth_Bps must be finite and > 0, got {self.bandwidth_Bps}"
            )


# Five standard link tiers: three 70 ms WANs with increasing bandwidth and
# two 0.02 ms LANs.  Bandwidths are in bytes/second.
PRESETS = {
    "wan_s": NetworkConfig("wan_s", 70e-3, 70e6),
    "wan_m": NetworkConfig("wan_m", 70e-3, 1e9),
    "wan_f": NetworkConfig("wan_f", 70e-3, 50e9),
    "lan_s": NetworkConfig("lan_s", 0.02e-3, 1e9),
    "lan_f": NetworkConfig("lan_f", 0.02e-3, 50e9),
}

PRESET_NAMES = tuple(PRESETS)


def preset(name: str) -> NetworkConfig:
    """Return a named link preset; raises KeyError style ValueError if unknown."""
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown network preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None


def comm_time(rounds: float, nbytes: float, cfg: NetworkConfig) -> float:
    """Seconds to complete `rounds` synchronized exchanges moving `nbytes`."""
    if rounds < 0 or nbytes < 0:
        raise ValueError("rounds and nbytes must be >= 0")
    return rounds * cfg.rtt_s + nbytes / cfg.bandwidth_Bps


def cpu_comm_tier(cfg: NetworkConfig) -> str:
    """Bucket a link into the high/med/low activity tiers used by the power model."""
    if cfg.bandwidth_Bps >= 10e9:
        return "high"
    if cfg.bandwidth_Bps >= 0.5e9:
        return "med"
    return "low"
