"""What-if studies: context-length scaling and compute-vs-network advancement.

Hardware scaling divides every compute term by a ratio x while leaving
rounds and bytes untouched (computation improves, the network does not);
CPU and GPU work scale together.  Context sweeps rebuild profiles at each
sequence length and normalize at the 128-token anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .calibration import Calibration, default_calibration
from .netmodel import NetworkConfig
from .protocols import CostProfile, build_profile
from .simkit import run_inference

CONTEXT_ANCHOR = 128
CONTEXT_RANGE = (16, 512)


def scale_hardware(profile: CostProfile, x: float) -> CostProfile:
    """Profile with all compute x times faster; composition is exact:
    scaling by a then b equals scaling by a*b."""
    if x < 1:
        raise ValueError("hardware ratio x must be >= 1")
    layers = [replace(l,
                      online_compute_s=l.online_compute_s / x,
                      offline_compute_s=l.offline_compute_s / x)
              for l in profile.per_layer]
    return replace(profile, per_layer=layers)


def latency_at(profile: CostProfile, cfg: NetworkConfig, x: float = 1.0,
               include_offline: bool = False, per_sample: bool = True) -> float:
    scaled = scale_hardware(profile, x) if x != 1.0 else profile
    total = run_inference(scaled, cfg, include_offline=include_offline).total_latency_s
    return total / profile.batch if per_sample else total


@dataclass
class ContextCurve:
    scheme: str
    lengths: list
    latency_s: list        # per batch, online
    normalized: list       # anchored at the 128-token profile

    def slope(self, n_from: int, n_to: int) -> float:
        """Normalized growth between two lengths (ratio of curve values)."""
        return (self.normalized[self.lengths.index(n_to)]
                / self.normalized[self.lengths.index(n_from)])


def context_sweep(model: str, lengths, scheme: str, cfg: NetworkConfig,
                  batch: int = 128, include_max: bool = True,
                  cal: Calibration = None) -> ContextCurve:
    """Online latency vs context length, normalized at 128 tokens.

    include_max=False gives the variant without the stabilizing max
    reduction in front of softmax, matching how the homomorphic pipeline
    is evaluated.
    """
    cal = cal or default_calibration()
    lengths = sorted(set(int(n) for n in lengths))
    if any(n < CONTEXT_RANGE[0] or n > CONTEXT_RANGE[1] for n in lengths):
        raise ValueError(f"context lengths must lie within {CONTEXT_RANGE}")

    def lat(n):
        p = build_profile(model, scheme, batch=batch, seq_len=n,
                          include_max=include_max, cal=cal)
        return run_inference(p, cfg).total_latency_s

    anchor = lat(CONTEXT_ANCHOR)
    vals = [lat(n) for n in lengths]
    return ContextCurve(scheme, lengths, vals, [v / anchor for v in vals])


def hw_sweep(profiles: dict, cfg: NetworkConfig, ratios,
             include_offline: bool = False) -> dict:
    """Per-sample latency of each labeled profile across hardware ratios.

    Returns raw seconds plus both normalizations (the figure convention is
    ambiguous, so both are emitted): 'norm_per_x' divides by the slowest
    scheme at each x, 'norm_global' by the slowest scheme at x = 1.
    """
    ratios = [float(x) for x in ratios]
    raw = {label: [latency_at(p, cfg, x, include_offline) for x in ratios]
           for label, p in profiles.items()}
    slowest_at = [max(raw[l][i] for l in raw) for i in range(len(ratios))]
    slowest_global = max(raw[l][0] for l in raw)
    return {
        "ratios": ratios,
        "latency_s": raw,
        "norm_per_x": {l: [v / s for v, s in zip(vals, slowest_at)]
                       for l, vals in raw.items()},
        "norm_global": {l: [v / slowest_global for v in vals]
                        for l, vals in raw.items()},
    }


def crossover(profile_a: CostProfile, profile_b: CostProfile,
              cfg: NetworkConfig, x_range=(1.0, 100.0),
              include_offline: bool = False, tol: float = 1e-6):
    """Hardware ratio x* in x_range where the two schemes' per-sample
    latencies cross, or None when the ordering never flips.

    Latencies are compute/x + communication, hence monotone in x; equal
    profiles degenerate to the lower endpoint.
    """
    lo, hi = float(x_range[0]), float(x_range[1])
    if lo < 1 or hi <= lo:
        raise ValueError("x_range must satisfy 1 <= lo < hi")
    for p in (profile_a, profile_b):
        if any(l.online_compute_s < 0 or l.offline_compute_s < 0
               for l in p.per_layer):
            raise ValueError("negative compute terms make latency non-monotone in x")

    def diff(x):
        return (latency_at(profile_a, cfg, x, include_offline)
                - latency_at(profile_b, cfg, x, include_offline))

    d_lo, d_hi = diff(lo), diff(hi)
    if d_lo == 0.0 and d_hi == 0.0:
        return lo  # identical latency curves
    if d_lo == 0.0:
        return lo
    if d_hi == 0.0:
        return hi
    if math.copysign(1, d_lo) == math.copysign(1, d_hi):
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        d_mid = diff(mid)
        if abs(d_mid) == 0.0 or hi - lo < tol:
            return mid
        if math.copysign(1, d_mid) == math.copysign(1, d_lo):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
