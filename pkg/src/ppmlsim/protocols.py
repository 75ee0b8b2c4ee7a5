"""Per-scheme cost profiles: rounds, bytes, compute, keys and memory.

Two tiers work together here.  The analytic tier prices every layer from
first principles (gate compositions for the interactive schemes, per-op
counts for the homomorphic one); its relu/compare formulas match the
executable kernels bit for bit.  The calibrated tier rescales the analytic
per-layer columns so that model-level totals reproduce the fitted
reference measurements; the analytic tier then supplies the shape when a
profile is rebuilt at a different batch size or context length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import reference_data as ref
from . import workload
from .calibration import Calibration, default_calibration
from .fitting import CalibrationFit, SingularFitError, fit_profile  # re-exported
from .mpc_kernels.compare import (a2b_compare_rounds, a2b_compare_round_bits,
                                  a2b_compare_wire_bytes)
from .mpc_kernels.fss import dcf_pair_bytes
from .workload import ModelGraph, build_builtin_model, model_op_counts

SCHEMES = ("a2b", "fss", "fhe")

# Effective local throughput (flop-equivalents/s) assumed for profiles of
# custom graphs that have no fitted reference row.
_DEFAULT_FLOPS_PER_S = 2.0e12
_GB = 1e9


@dataclass
class LayerCost:
    name: str
    kind: str
    online_rounds: float = 0.0
    online_bytes: float = 0.0
    offline_bytes: float = 0.0
    online_compute_s: float = 0.0
    offline_compute_s: float = 0.0
    key_bytes: float = 0.0
    gpu_mem_bytes: float = 0.0
    cpu_mem_bytes: float = 0.0

    def scaled(self, **factors) -> "LayerCost":
        out = replace(self)
        for fld, factor in factors.items():
            setattr(out, fld, getattr(self, fld) * factor)
        return out


_COST_FIELDS = ("online_rounds", "online_bytes", "offline_bytes",
                "online_compute_s", "offline_compute_s", "key_bytes",
                "gpu_mem_bytes", "cpu_mem_bytes")


@dataclass
class CostProfile:
    scheme: str
    model: str
    batch: int
    seq_len: int
    per_layer: list
    offline_rounds: float = 0.0  # bulk shipment handshakes, not per layer
    calibrated: bool = False

    def _total(self, fld: str) -> float:
        return sum(getattr(l, fld) for l in self.per_layer)

    @property
    def online_rounds(self):
        return self._total("online_rounds")

    @property
    def online_bytes(self):
        return self._total("online_bytes")

    @property
    def offline_bytes(self):
        return self._total("offline_bytes")

    @property
    def online_compute_s(self):
        return self._total("online_compute_s")

    @property
    def offline_compute_s(self):
        return self._total("offline_compute_s")

    @property
    def key_bytes(self):
        return self._total("key_bytes")

    @property
    def gpu_mem_bytes(self):
        return self._total("gpu_mem_bytes")

    @property
    def cpu_mem_bytes(self):
        return self._total("cpu_mem_bytes")

    def totals(self) -> dict:
        return {fld: self._total(fld) for fld in _COST_FIELDS}

    @property
    def boundary_bytes(self) -> float:
        """Online bytes of the io layers (homomorphic input/output transfer)."""
        return sum(l.online_bytes for l in self.per_layer if l.kind == "io")

    @property
    def boundary_rounds(self) -> float:
        return sum(l.online_rounds for l in self.per_layer if l.kind == "io")


# ---------------------------------------------------------------------------
# Spec-level cost formulas (kernel-exact where a kernel exists)
# ---------------------------------------------------------------------------

def a2b_nonlinear_cost(elems: int, ring_bits: int = 64, r0: int = None,
                       r1: int = None, c: float = None, cal: Calibration = None):
    """(rounds, online bytes, offline bytes) of one share-conversion compare.

    With c unset the byte count is the exact bit-packed wire size of the
    executable ladder; passing c switches to the smooth c*k*elems/8 form.
    """
    if ring_bits not in (32, 64):
        raise ValueError("ring_bits must be 32 or 64")
    if elems < 0:
        raise ValueError("elems must be >= 0")
    cal = cal or default_calibration()
    r0 = cal.a2b_r0 if r0 is None else r0
    r1 = cal.a2b_r1 if r1 is None else r1
    rounds = r0 + r1 * math.ceil(math.log2(ring_bits))
    if c is None:
        online = a2b_compare_wire_bytes(elems, ring_bits)
    else:
        online = c * ring_bits * elems / 8
    offline = cal.gate("a2b", "compare").offline_bytes_per_elem * elems
    return rounds, online, offline


def fss_nonlinear_cost(elems: int, ring_bits: int = 64, sec_bits: int = 128,
                       kappa: float = None, cal: Calibration = None):
    """(rounds, online bytes, key bytes) of one masked-reveal gate layer.

    One round regardless of width: the parties reveal the masked input and
    evaluate their function shares locally.  Key volume is kappa
    comparison-key pairs per element at the construction's serialized size.
    """
    if elems < 0:
        raise ValueError("elems must be >= 0")
    if sec_bits != 128:
        raise ValueError("only 128-bit tree seeds are supported")
    cal = cal or default_calibration()
    kappa = cal.fss_kappa if kappa is None else kappa
    online = ring_bits / 8 * elems
    keys = elems * kappa * dcf_pair_bytes(ring_bits, payload_words=1)
    return 1, online, keys


# ---------------------------------------------------------------------------
# Analytic per-layer costing for the interactive schemes
# ---------------------------------------------------------------------------

def _mpc_layer_cost(layer: workload.LayerSpec, scheme: str, cal: Calibration) -> LayerCost:
    gate = lambda name: cal.gate(scheme, name)
    pair_bytes = dcf_pair_bytes(cal.ring_bits, payload_words=1) * cal.fss_kappa
    out = LayerCost(layer.name, layer.kind)
    e = layer.in_elems
    w = layer.window
    compute_weight = layer.flops()

    def add(rounds, nbytes, offline=0.0, key_pairs_elems=0.0):
        out.online_rounds += rounds
        out.online_bytes += nbytes
        out.offline_bytes += offline
        out.key_bytes += key_pairs_elems * pair_bytes

    if layer.kind in ("matmul", "conv2d"):
        opened = layer.in_elems + layer.rhs_elems
        add(1, 8 * opened, offline=16 * (opened + layer.out_elems))
    elif layer.kind == "avgpool":
        pass  # linear and local under additive sharing
    elif layer.kind in ("relu",):
        if scheme == "a2b":
            cmp_rounds, cmp_bytes, cmp_off = a2b_nonlinear_cost(e, cal.ring_bits, cal=cal)
            mult = gate("mult")
            add(cmp_rounds + mult.rounds, cmp_bytes + mult.bytes_per_elem * e,
                offline=cmp_off + mult.offline_bytes_per_elem * e)
        else:
            g = gate("relu")
            add(g.rounds, g.bytes_per_elem * e, key_pairs_elems=g.key_pairs_per_elem * e)
        compute_weight += 64 * e
    elif layer.kind in ("max_reduce", "maxpool"):
        levels = max(1, math.ceil(math.log2(max(2, w))))
        processed = e * (w - 1) / w
        if scheme == "a2b":
            _, cmp_bytes, cmp_off = a2b_nonlinear_cost(1, cal.ring_bits, cal=cal)
            sel = gate("select")
            per_round = a2b_compare_rounds(cal.ring_bits) + sel.rounds
            add(levels * per_round,
                processed * (a2b_compare_wire_bytes(1024, cal.ring_bits) / 1024
                             + sel.bytes_per_elem),
                offline=processed * (cmp_off + sel.offline_bytes_per_elem))
        else:
            cmp, sel = gate("compare"), gate("select")
            add(levels, processed * (cmp.bytes_per_elem + sel.bytes_per_elem),
                key_pairs_elems=processed * (cmp.key_pairs_per_elem
                                             + sel.key_pairs_per_elem))
        compute_weight += 64 * processed
    elif layer.kind == "softmax":
        rows = e / w
        if scheme == "a2b":
            ex, rc, mu = gate("exp"), gate("recip"), gate("mult")
            add(ex.rounds + rc.rounds + mu.rounds,
                ex.bytes_per_elem * e + rc.bytes_per_elem * rows + mu.bytes_per_elem * e,
                offline=(ex.offline_bytes_per_elem * e
                         + rc.offline_bytes_per_elem * rows
                         + mu.offline_bytes_per_elem * e))
        else:
            lut, mu = gate("lut"), gate("mult")
            add(2 * lut.rounds + mu.rounds,
                lut.bytes_per_elem * (e + rows) + mu.bytes_per_elem * e,
                offline=mu.offline_bytes_per_elem * e,
                key_pairs_elems=lut.key_pairs_per_elem * (e + rows))
        compute_weight += 128 * e
    elif layer.kind == "gelu":
        if scheme == "a2b":
            cmp_rounds, cmp_bytes, cmp_off = a2b_nonlinear_cost(e, cal.ring_bits, cal=cal)
            mu = gate("mult")
            add(cmp_rounds + 2 * mu.rounds, cmp_bytes + 2 * mu.bytes_per_elem * e,
                offline=cmp_off + 2 * mu.offline_bytes_per_elem * e)
        else:
            lut = gate("lut")
            add(lut.rounds, lut.bytes_per_elem * e,
                key_pairs_elems=lut.key_pairs_per_elem * e)
        compute_weight += 96 * e
    elif layer.kind == "layernorm":
        rows = e / w
        if scheme == "a2b":
            mu, rs = gate("mult"), gate("rsqrt")
            add(2 * mu.rounds + rs.rounds,
                2 * mu.bytes_per_elem * e + rs.bytes_per_elem * rows,
                offline=2 * mu.offline_bytes_per_elem * e
                + rs.offline_bytes_per_elem * rows)
        else:
            mu, lut = gate("mult"), gate("lut")
            add(2 * mu.rounds + lut.rounds,
                2 * mu.bytes_per_elem * e + lut.bytes_per_elem * rows,
                offline=2 * mu.offline_bytes_per_elem * e,
                key_pairs_elems=lut.key_pairs_per_elem * rows)
        compute_weight += 48 * e
    else:
        raise ValueError(f"no cost model for layer kind {layer.kind}")

    out.online_compute_s = compute_weight / _DEFAULT_FLOPS_PER_S
    out.offline_compute_s = 0.2 * out.online_compute_s if out.offline_bytes else 0.0
    if scheme == "fss":
        out.offline_bytes += out.key_bytes
    # resident footprint: weights as shares plus this layer's activations
    out.cpu_mem_bytes = 8 * (2 * layer.weight_elems + layer.out_elems)
    out.gpu_mem_bytes = 8 * 2 * (layer.in_elems + layer.out_elems)
    if scheme == "fss":
        out.cpu_mem_bytes += out.key_bytes
    return out


def analytic_profile(graph: ModelGraph, scheme: str, cal: Calibration = None) -> CostProfile:
    """Formula-only profile; relu/compare rows match the kernels exactly."""
    cal = cal or default_calibration()
    if scheme == "fhe":
        return fhe_profile(graph, None, cal=cal)
    if scheme not in ("a2b", "fss"):
        raise ValueError(f"unknown scheme {scheme!r}")
    layers = [_mpc_layer_cost(l, scheme, cal) for l in graph.layers]
    return CostProfile(scheme, graph.name, graph.batch, graph.seq_len, layers)


# ---------------------------------------------------------------------------
# Homomorphic profile: per-op counts times a per-op latency table
# ---------------------------------------------------------------------------

_FHE_OPS = ("ctpt_mul_s", "ctct_mul_s", "rotation_s", "bootstrap_s")


def graph_family(graph: ModelGraph) -> str:
    return "transformer" if any(l.kind in ("softmax", "layernorm", "gelu")
                                for l in graph.layers) else "cnn"


def _fhe_layer_cost(layer, ops, recipe, slots, ct_bytes, rot_per_mul) -> LayerCost:
    out = LayerCost(layer.name, layer.kind)
    cts = layer.in_elems / slots
    if layer.kind == "conv2d" or (layer.kind == "matmul" and layer.weight_dims):
        muls = (layer.flops() if layer.kind == "conv2d" else layer.flops() / 2) / slots
        out.online_compute_s = muls * (ops["ctpt_mul_s"] + rot_per_mul * ops["rotation_s"])
        out.gpu_mem_bytes = (layer.in_elems + layer.out_elems) / slots * ct_bytes \
            + 8 * layer.weight_elems
    elif layer.kind == "matmul":
        muls = (layer.flops() / 2) / slots
        out.online_compute_s = muls * ops["ctct_mul_s"]
        out.gpu_mem_bytes = (layer.in_elems + layer.out_elems) / slots * ct_bytes
    elif layer.kind in ("avgpool", "maxpool"):
        out.online_compute_s = cts * (ops["ctpt_mul_s"] + rot_per_mul * ops["rotation_s"])
        out.gpu_mem_bytes = 2 * cts * ct_bytes
    elif layer.kind == "max_reduce":
        pass  # substituted by a constant in the homomorphic pipeline
    elif layer.kind in ("relu", "gelu", "softmax", "layernorm"):
        out.online_compute_s = cts * (recipe[f"{layer.kind}_ctct"] * ops["ctct_mul_s"]
                                      + recipe[f"{layer.kind}_boot"] * ops["bootstrap_s"])
        out.gpu_mem_bytes = 3 * cts * ct_bytes
    else:
        raise ValueError(f"no homomorphic cost model for {layer.kind}")
    return out


def fhe_profile(graph: ModelGraph, per_op_latency: dict = None,
                cal: Calibration = None) -> CostProfile:
    """Network-insensitive profile: all compute, two boundary transfers.

    per_op_latency must supply seconds per ct-pt multiply, ct-ct multiply,
    rotation and bootstrap; when omitted it is taken from the calibration
    table for the graph's model family.
    """
    cal = cal or default_calibration()
    family = graph_family(graph)
    ops = per_op_latency if per_op_latency is not None else cal.fhe_ops[family]
    missing = [k for k in _FHE_OPS if k not in ops]
    if missing:
        raise ValueError(f"per-op latency table is missing {missing}")
    recipe = cal.fhe_recipe
    slots = cal.slots
    ct_bytes = 2 * (2 * slots) * cal.fhe_memory["limbs"] * 8
    boundary_ct = 2 * (2 * slots) * cal.fhe_memory["boundary_limbs"] * 8
    rot_per_mul = recipe["conv_rot_per_mul" if family == "cnn" else "matmul_rot_per_mul"]

    layers = []
    in_elems = graph.layers[0].in_elems if graph.layers else 0
    out_elems = graph.layers[-1].out_elems if graph.layers else 0
    layers.append(LayerCost("input_upload", "io", online_rounds=1,
                            online_bytes=math.ceil(in_elems / slots) * boundary_ct))
    for layer in graph.layers:
        layers.append(_fhe_layer_cost(layer, ops, recipe, slots, ct_bytes, rot_per_mul))
    layers.append(LayerCost("output_download", "io", online_rounds=1,
                            online_bytes=math.ceil(out_elems / slots) * boundary_ct))
    base_gb = cal.fhe_memory[f"{family}_base_gb"]
    if layers:
        layers[0].gpu_mem_bytes += base_gb * _GB  # evaluation keys and cached tables
        layers[0].key_bytes += base_gb * _GB
    return CostProfile("fhe", graph.name, graph.batch, graph.seq_len, layers,
                       calibrated=per_op_latency is None)


# ---------------------------------------------------------------------------
# Calibrated profiles for the builtin models
# ---------------------------------------------------------------------------

def _scale_columns(layers, targets: dict):
    """Rescale analytic per-layer columns so each field totals its target."""
    scaled = [replace(l) for l in layers]
    for fld, target in targets.items():
        current = sum(getattr(l, fld) for l in scaled)
        if current <= 0:
            if target > 0 and scaled:
                # distribute uniformly when the analytic column is empty
                for l in scaled:
                    setattr(l, fld, target / len(scaled))
            continue
        factor = target / current
        for l in scaled:
            setattr(l, fld, getattr(l, fld) * factor)
    return scaled


def build_profile(model, scheme: str, batch: int = 1, seq_len: int = 128,
                  include_max: bool = True, cal: Calibration = None) -> CostProfile:
    """Cost profile for a builtin model name or an explicit ModelGraph.

    Builtin models are calibrated: totals reproduce the fitted reference
    rows, rebuilt analytically when batch or context length differ from
    the measured configuration.  Explicit graphs fall back to the analytic
    tier.
    """
    cal = cal or default_calibration()
    if isinstance(model, ModelGraph):
        return analytic_profile(model, scheme, cal)
    if scheme == "fhe":
        graph = build_builtin_model(model, seq_len, batch, include_max)
        return fhe_profile(graph, None, cal=cal)

    graph = build_builtin_model(model, seq_len, batch, include_max)
    analytic = analytic_profile(graph, scheme, cal)
    on = cal.fit(model, scheme, "online")
    oo = cal.fit(model, scheme, "onoff")

    targets = {
        "online_rounds": on.rounds,
        "online_bytes": on.bytes_at(batch),
        "online_compute_s": on.compute_at(batch),
        "offline_bytes": max(0.0, oo.bytes_at(batch) - on.bytes_at(batch)),
        "offline_compute_s": max(0.0, oo.compute_at(batch) - on.compute_at(batch)),
    }
    # context length scaling: the fits were taken at 128 tokens; reshape the
    # targets by the analytic ratio between the requested and the fitted graph
    if model in ("bert_tiny", "bert_base") and seq_len != 128:
        base = analytic_profile(
            build_builtin_model(model, 128, batch, include_max), scheme, cal)
        ratio = lambda fld: (getattr(analytic, fld) / getattr(base, fld)
                             if getattr(base, fld) > 0 else 1.0)
        targets["online_rounds"] *= ratio("online_rounds")
        targets["online_bytes"] *= ratio("online_bytes")
        targets["online_compute_s"] *= ratio("online_compute_s")
        targets["offline_bytes"] *= ratio("offline_bytes")
        targets["offline_compute_s"] *= ratio("offline_compute_s")
    if scheme == "fss":
        targets["key_bytes"] = targets["offline_bytes"]

    # memory: anchor the analytic footprint to the observed peaks when known
    peak = ref.PEAK_MEMORY_GB.get((model, scheme))
    if peak:
        targets["cpu_mem_bytes"] = peak[0] * _GB
        targets["gpu_mem_bytes"] = peak[1] * _GB

    layers = _scale_columns(analytic.per_layer, targets)
    offline_rounds = max(0.0, oo.rounds - on.rounds)
    return CostProfile(scheme, model, batch, seq_len, layers,
                       offline_rounds=offline_rounds, calibrated=True)
