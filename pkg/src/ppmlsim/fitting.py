"""Decompose observed latencies into compute, round and volume terms.

The model is  latency = compute_s + rounds * rtt + bytes / bandwidth,
solved as a nonnegative least-squares problem over a set of (network,
latency) observations.  Three observations with distinct RTT/bandwidth
already determine the three parameters exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .netmodel import NetworkConfig


class SingularFitError(ValueError):
    """The observations do not distinguish compute, rounds and bytes."""


@dataclass(frozen=True)
class CalibrationFit:
    compute_s: float
    rounds: float
    online_bytes: float
    residual: float  # max relative error over the observations

    def predict(self, cfg: NetworkConfig) -> float:
        return self.compute_s + self.rounds * cfg.rtt_s + self.online_bytes / cfg.bandwidth_Bps


def fit_profile(observations) -> CalibrationFit:
    """Fit (compute_s, rounds, bytes) to [(NetworkConfig, latency_s), ...]."""
    if len(observations) < 3:
        raise ValueError("need at least 3 observations to fit 3 parameters")
    design = np.array([[1.0, cfg.rtt_s, 1.0 / cfg.bandwidth_Bps]
                       for cfg, _ in observations])
    target = np.array([lat for _, lat in observations], dtype=float)
    if np.any(target < 0):
        raise ValueError("latencies must be >= 0")
    if np.linalg.matrix_rank(design) < 3:
        raise SingularFitError(
            "observations do not span distinct RTT/bandwidth combinations"
        )
    params, _ = nnls(design, target)
    compute_s, rounds, nbytes = params
    predicted = design @ params
    denom = np.maximum(target, 1e-12)
    residual = float(np.max(np.abs(predicted - target) / denom))
    return CalibrationFit(float(compute_s), float(rounds), float(nbytes), residual)
