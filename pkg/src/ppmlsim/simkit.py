"""Deterministic simulation: phase timelines, batching, and the key-pool queue.

A PhaseTimeline is the common currency of the toolkit: latency is its sum,
and the energy/money accounting maps each phase kind to power states and
billing meters.  The queue simulator reproduces the serving scenario where
single-use key material is consumed per job and replenished by a dealer
over a bottleneck link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .netmodel import NetworkConfig, comm_time
from .protocols import CostProfile

PHASE_KINDS = ("gpu_compute_heavy", "gpu_compute_light", "cpu_compute",
               "comm_active", "comm_wait_idle", "disk_read",
               "offline_keygen", "offline_transfer")


@dataclass
class Phase:
    kind: str
    duration_s: float
    nbytes: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.kind not in PHASE_KINDS:
            raise ValueError(f"unknown phase kind {self.kind!r}")
        if self.duration_s < 0:
            raise ValueError("phase durations must be >= 0")


@dataclass
class PhaseTimeline:
    phases: list = field(default_factory=list)

    @property
    def total_latency_s(self) -> float:
        return sum(p.duration_s for p in self.phases)

    def duration(self, *kinds) -> float:
        return sum(p.duration_s for p in self.phases if p.kind in kinds)

    def bytes_moved(self, *kinds) -> float:
        return sum(p.nbytes for p in self.phases if p.kind in kinds)

    @property
    def online_latency_s(self) -> float:
        return self.total_latency_s - self.duration("offline_keygen", "offline_transfer")

    @property
    def compute_latency_s(self) -> float:
        return self.duration("gpu_compute_heavy", "gpu_compute_light", "cpu_compute")

    def boundary_comm_s(self) -> float:
        """Communication attributable to io layers (homomorphic boundary)."""
        return sum(p.duration_s for p in self.phases
                   if p.kind in ("comm_active", "comm_wait_idle")
                   and p.label.endswith(("input_upload", "output_download")))


def _compute_kind(scheme: str) -> str:
    return "gpu_compute_heavy" if scheme == "fhe" else "gpu_compute_light"


def run_inference(profile: CostProfile, cfg: NetworkConfig, batch: int = None,
                  include_offline: bool = False,
                  disk_read_Bps: float = None) -> PhaseTimeline:
    """Sequence one inference into compute/communicate/wait phases.

    The profile must have been generated for the requested batch size.
    With disk_read_Bps set, single-use key material is staged through disk:
    reads serialize ahead of the online phase (and writes extend the
    offline phase when it is included).
    """
    if batch is not None and batch != profile.batch:
        raise ValueError(f"profile was built for batch {profile.batch}, got {batch}")
    tl = PhaseTimeline()
    add = tl.phases.append
    if include_offline:
        if profile.offline_compute_s > 0:
            add(Phase("offline_keygen", profile.offline_compute_s))
        off_bytes = profile.offline_bytes
        if off_bytes > 0 or profile.offline_rounds > 0:
            add(Phase("offline_transfer",
                      comm_time(profile.offline_rounds, off_bytes, cfg), off_bytes))
        if disk_read_Bps and profile.key_bytes > 0:
            add(Phase("disk_read", profile.key_bytes / disk_read_Bps,
                      profile.key_bytes, label="key_write"))
    if disk_read_Bps and profile.key_bytes > 0 and profile.scheme == "fss":
        add(Phase("disk_read", profile.key_bytes / disk_read_Bps,
                  profile.key_bytes, label="key_read"))
    kind = _compute_kind(profile.scheme)
    for layer in profile.per_layer:
        if layer.online_compute_s > 0:
            add(Phase(kind, layer.online_compute_s, label=layer.name))
        if layer.online_bytes > 0:
            add(Phase("comm_active", layer.online_bytes / cfg.bandwidth_Bps,
                      layer.online_bytes, label=layer.name))
        if layer.online_rounds > 0:
            add(Phase("comm_wait_idle", layer.online_rounds * cfg.rtt_s,
                      label=layer.name))
    return tl


def throughput(profile: CostProfile, cfg: NetworkConfig, batch: int = None,
               include_offline: bool = False, disk_read_Bps: float = None) -> float:
    """Steady-state samples/second; round latency is paid once per batch."""
    tl = run_inference(profile, cfg, batch, include_offline, disk_read_Bps)
    total = tl.total_latency_s
    return profile.batch / total if total > 0 else math.inf


def effective_throughput_collapse(profile: CostProfile, cfg: NetworkConfig,
                                  disk_read_Bps: float = None):
    """(online qps, online+offline qps): the served rate before and after
    pre-generated key material runs out."""
    online = throughput(profile, cfg, include_offline=False,
                        disk_read_Bps=disk_read_Bps)
    both = throughput(profile, cfg, include_offline=True,
                      disk_read_Bps=disk_read_Bps)
    return online, both


# ---------------------------------------------------------------------------
# Key-pool queue simulation
# ---------------------------------------------------------------------------

@dataclass
class Job:
    id: int
    model: str
    batch: int
    arrival_s: float
    key_demand_bytes: float
    start_s: float = None
    finish_s: float = None
    starved: bool = False

    @property
    def wait_s(self):
        return None if self.start_s is None else self.start_s - self.arrival_s

    @property
    def sojourn_s(self):
        return None if self.finish_s is None else self.finish_s - self.arrival_s


@dataclass
class KeyPool:
    """Local stock of single-use key material with a continuous refill."""

    capacity_bytes: float
    level_bytes: float = None          # defaults to full
    dealer_link_Bps: float = math.inf  # dealer-to-server shipping bandwidth
    dealer_gen_Bps: float = math.inf   # dealer generation throughput
    disk_read_Bps: float = None        # optional disk tier on the consume path

    def __post_init__(self):
        if self.level_bytes is None:
            self.level_bytes = self.capacity_bytes
        if not 0 <= self.level_bytes <= self.capacity_bytes:
            raise ValueError("level must lie in [0, capacity]")

    @property
    def refill_Bps(self) -> float:
        rate = min(self.dealer_link_Bps, self.dealer_gen_Bps)
        if self.disk_read_Bps is not None:
            rate = min(rate, self.disk_read_Bps)
        return rate


def generate_jobs(seed: int, mean_interarrival_s: float, n_jobs: int,
                  model: str, batch: int, key_demand_bytes: float):
    """Poisson arrivals via inverse-CDF sampling on a seeded PCG64 stream."""
    rng = np.random.default_rng(seed)
    gaps = -mean_interarrival_s * np.log1p(-rng.random(n_jobs))
    arrivals = np.cumsum(gaps)
    return [Job(i, model, batch, float(arrivals[i]), float(key_demand_bytes))
            for i in range(n_jobs)]


class StarvationError(RuntimeError):
    """A job demands more key material than the pool can ever hold."""


@dataclass
class QueueResult:
    jobs: list
    events: list  # (time_s, kind, job_id, pool_level_bytes)
    seed: int
    service_s: float
    starved: bool

    @property
    def served(self):
        return [j for j in self.jobs if not j.starved]

    def waits(self):
        return [j.wait_s for j in self.served]

    def sojourns(self):
        return [j.sojourn_s for j in self.served]

    def dump_event_log(self) -> str:
        lines = ["time_s,event,job_id,pool_level_bytes"]
        for t, kind, jid, level in self.events:
            lines.append(f"{t:.6f},{kind},{jid},{level:.0f}")
        return "\n".join(lines) + "\n"


def run_queue_sim(jobs, pool: KeyPool, profile: CostProfile,
                  cfg: NetworkConfig, seed: int = 0) -> QueueResult:
    """Serve jobs FIFO; a job starts once the pool holds its key demand.

    The dealer refills continuously at the binding rate (generation, link,
    or disk tier) and is work conserving: it only idles at capacity.  Jobs
    whose demand exceeds the pool capacity can never start; they and all
    jobs queued behind them are reported starved.
    """
    service = run_inference(profile, cfg).total_latency_s
    rate = pool.refill_Bps
    events = []
    level = pool.level_bytes
    t_anchor = 0.0  # time at which `level` was observed
    prev_grant = 0.0
    starved = False
    jobs = sorted(jobs, key=lambda j: j.arrival_s)
    for job in jobs:
        events.append((job.arrival_s, "arrival", job.id,
                       min(pool.capacity_bytes, level + rate * max(0.0, job.arrival_s - t_anchor))))
        if starved or job.key_demand_bytes > pool.capacity_bytes:
            job.starved = True
            starved = True
            events.append((job.arrival_s, "starved", job.id, level))
            continue
        earliest = max(job.arrival_s, prev_grant)
        avail = min(pool.capacity_bytes, level + rate * (earliest - t_anchor))
        if avail >= job.key_demand_bytes:
            grant = earliest
        else:
            if rate <= 0:
                job.starved = True
                starved = True
                events.append((earliest, "starved", job.id, avail))
                continue
            deficit = job.key_demand_bytes - (level + rate * (earliest - t_anchor))
            grant = earliest + max(0.0, deficit) / rate
        level = min(pool.capacity_bytes, level + rate * (grant - t_anchor))
        level -= job.key_demand_bytes
        t_anchor = grant
        prev_grant = grant
        job.start_s = grant
        job.finish_s = grant + service
        events.append((grant, "start", job.id, level))
        events.append((job.finish_s, "finish", job.id,
                       min(pool.capacity_bytes, level + rate * (job.finish_s - grant))))
    events.sort(key=lambda e: (e[0], e[1]))
    return QueueResult(jobs, events, seed, service, starved)
