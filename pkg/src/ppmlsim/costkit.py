"""Energy and monetary accounting over phase timelines.

Each phase kind maps every hardware component (gpu, cpu, memory/IO, nic)
to a power state; energy is the exact sum of duration x mapped wattage.
Money follows the cloud billing structure: per-second instance and
storage, a per-second port charge on the fast link tiers, and volume
pricing per GB transferred.  WAN transit energy is societal accounting,
reported on the side and never added to provider totals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .calibration import Calibration, default_calibration
from .netmodel import NetworkConfig, cpu_comm_tier
from .simkit import PHASE_KINDS, PhaseTimeline

COMPONENTS = ("gpu", "cpu", "mem_io", "nic")


@dataclass(frozen=True)
class PowerTable:
    """Component wattage per activity state."""

    gpu_heavy: float = 250.0
    gpu_light: float = 50.0
    gpu_idle: float = 6.0
    cpu_high: float = 60.0
    cpu_med: float = 25.0
    cpu_idle: float = 16.0
    mem_high: float = 15.0
    mem_med: float = 5.0
    mem_idle: float = 3.0
    nic_high: float = 25.0
    nic_med: float = 10.0
    nic_idle: float = 5.0

    def __post_init__(self):
        for comp in ("gpu", "cpu", "mem", "nic"):
            names = [f"{comp}_{lvl}" for lvl in
                     (("heavy", "light", "idle") if comp == "gpu"
                      else ("high", "med", "idle"))]
            vals = [getattr(self, n) for n in names]
            if not vals[0] >= vals[1] >= vals[2] >= 0:
                raise ValueError(f"{comp} power states must be ordered high >= low >= 0")

    @classmethod
    def from_calibration(cls, cal: Calibration) -> "PowerTable":
        return cls(**cal.power)


@dataclass(frozen=True)
class PriceTable:
    instance_per_s: float = 0.001
    storage_per_s_per_5tb: float = 9.6e-5
    fast_port_per_s: float = 0.0236
    transfer_per_gb: float = 0.02
    wan_transit_j_per_gb: float = 850.0

    def __post_init__(self):
        for name in ("instance_per_s", "storage_per_s_per_5tb", "fast_port_per_s",
                     "transfer_per_gb", "wan_transit_j_per_gb"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def from_calibration(cls, cal: Calibration) -> "PriceTable":
        return cls(**cal.prices)


def _comm_states(tier: str):
    return {"cpu": tier, "mem_io": "med" if tier != "low" else "idle",
            "nic": tier if tier != "low" else "med"}


def phase_power_states(kind: str, tier: str) -> dict:
    """Component activity states for one phase kind on a link tier."""
    base = {"gpu": "idle", "cpu": "idle", "mem_io": "idle", "nic": "idle"}
    if kind == "gpu_compute_heavy":
        base.update(gpu="heavy", mem_io="high")
    elif kind == "gpu_compute_light":
        base.update(gpu="light", mem_io="med")
    elif kind == "cpu_compute":
        base.update(cpu="high", mem_io="med")
    elif kind in ("comm_active", "offline_transfer"):
        base.update(_comm_states(tier))
    elif kind == "comm_wait_idle":
        pass
    elif kind == "disk_read":
        base.update(cpu="med", mem_io="high")
    elif kind == "offline_keygen":
        base.update(cpu="high", mem_io="med")
    else:
        raise ValueError(f"phase kind {kind!r} has no power mapping")
    return base


def _watts(pt: PowerTable, comp: str, state: str) -> float:
    if comp == "gpu":
        name = {"heavy": "gpu_heavy", "light": "gpu_light", "idle": "gpu_idle"}[state]
    else:
        prefix = {"cpu": "cpu", "mem_io": "mem", "nic": "nic"}[comp]
        name = f"{prefix}_{'idle' if state in ('idle', 'low') else state}"
    return getattr(pt, name)


@dataclass
class EnergyBreakdown:
    """Joules per (phase kind, component); totals are exact sums."""

    cells: dict = field(default_factory=dict)  # (kind, component) -> J

    @property
    def total_j(self) -> float:
        return sum(self.cells.values())

    def by_kind(self, *kinds) -> float:
        return sum(v for (k, _), v in self.cells.items() if k in kinds)

    def by_component(self, comp: str) -> float:
        return sum(v for (_, c), v in self.cells.items() if c == comp)

    @property
    def idle_wait_j(self) -> float:
        return self.by_kind("comm_wait_idle")

    @property
    def idle_wait_share(self) -> float:
        total = self.total_j
        return self.idle_wait_j / total if total > 0 else 0.0


def energy(timeline: PhaseTimeline, pt: PowerTable,
           cfg: NetworkConfig) -> EnergyBreakdown:
    """Exact per-component, per-phase-kind energy of one party's machine."""
    tier = cpu_comm_tier(cfg)
    out = EnergyBreakdown()
    for phase in timeline.phases:
        states = phase_power_states(phase.kind, tier)
        for comp in COMPONENTS:
            key = (phase.kind, comp)
            joules = phase.duration_s * _watts(pt, comp, states[comp])
            out.cells[key] = out.cells.get(key, 0.0) + joules
    return out


def wan_transit_energy(nbytes: float, pr: PriceTable = None) -> float:
    """Joules burnt in the wide-area network moving nbytes; reported
    separately from machine energy and never billed."""
    if nbytes < 0:
        raise ValueError("nbytes must be >= 0")
    pr = pr or PriceTable()
    return nbytes / 1e9 * pr.wan_transit_j_per_gb


FAST_PORT_NETS = ("wan_f", "lan_f")


@dataclass
class CostBreakdown:
    instance: float
    storage: float
    port: float
    transfer_online: float
    transfer_offline: float

    @property
    def transfer(self) -> float:
        return self.transfer_online + self.transfer_offline

    @property
    def total(self) -> float:
        return self.instance + self.storage + self.port + self.transfer

    def items(self) -> dict:
        return {"instance": self.instance, "storage": self.storage,
                "port": self.port, "transfer_online": self.transfer_online,
                "transfer_offline": self.transfer_offline}

    @property
    def largest_item(self) -> str:
        return max(self.items(), key=lambda k: self.items()[k])

    def per_sample(self, batch: int) -> "CostBreakdown":
        return CostBreakdown(*(v / batch for v in
                               (self.instance, self.storage, self.port,
                                self.transfer_online, self.transfer_offline)))


def money(timeline: PhaseTimeline, traffic: dict, cfg: NetworkConfig,
          pr: PriceTable = None, storage_tb: float = 5.0) -> CostBreakdown:
    """Deployment cost of the run: instance + storage + port + volume.

    traffic carries online_bytes/offline_bytes totals (both billed at the
    volume rate); the port charge applies only on the fast link tiers.
    """
    pr = pr or PriceTable()
    duration = timeline.total_latency_s
    online = traffic.get("online_bytes", 0.0)
    offline = traffic.get("offline_bytes", 0.0)
    if online < 0 or offline < 0:
        raise ValueError("traffic byte counts must be >= 0")
    return CostBreakdown(
        instance=duration * pr.instance_per_s,
        storage=duration * pr.storage_per_s_per_5tb * (storage_tb / 5.0),
        port=duration * pr.fast_port_per_s if cfg.name in FAST_PORT_NETS else 0.0,
        transfer_online=online / 1e9 * pr.transfer_per_gb,
        transfer_offline=offline / 1e9 * pr.transfer_per_gb,
    )
