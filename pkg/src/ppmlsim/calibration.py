"""Calibration constants for the cost models, stored as a versioned INI file.

Everything tunable lives here: ring/fixed-point geometry, per-gate online
round/byte constants for the two interactive schemes, the per-operation
latency tables for the homomorphic backends, power and price tables, and
the per-(model, scheme) profile parameters fitted from the bundled
reference measurements.

`build_default_calibration()` regenerates the default file text from
`reference_data`; the shipped data/default_calibration.ini is exactly that
output.  Reports embed the SHA-256 of the calibration text so results are
traceable to the constants that produced them.
"""

from __future__ import annotations

import configparser
import hashlib
import importlib.resources
import io
import math
from dataclasses import dataclass

import numpy as np

from . import reference_data as ref
from . import workload
from .fitting import fit_profile
from .netmodel import PRESETS

SCHEMA = "ppmlsim-calibration-1"

RING_BITS = 64
FRACTION_BITS = 16
FSS_LAMBDA = 128
SLOTS_PER_CT = 32768  # polynomial degree 2^16, packed real slots


@dataclass(frozen=True)
class GateCost:
    """Online cost of one interactive gate, per input element per party."""
    rounds: float
    bytes_per_elem: float
    offline_bytes_per_elem: float = 0.0
    key_pairs_per_elem: float = 0.0  # comparison-key pair equivalents (fss)


# Per-gate constants for the arithmetic/binary-conversion scheme.  The
# compare gate mirrors the executable kernel bit for bit (see
# mpc_kernels.compare); everything else is a representative constant that
# the per-model fits rescale.
A2B_GATES = {
    "compare": GateCost(rounds=8, bytes_per_elem=373 / 8, offline_bytes_per_elem=158.0),
    "mult": GateCost(rounds=1, bytes_per_elem=16, offline_bytes_per_elem=48.0),
    "select": GateCost(rounds=1, bytes_per_elem=16, offline_bytes_per_elem=48.0),
    "exp": GateCost(rounds=8, bytes_per_elem=128, offline_bytes_per_elem=384.0),
    "recip": GateCost(rounds=12, bytes_per_elem=384, offline_bytes_per_elem=1152.0),
    "rsqrt": GateCost(rounds=10, bytes_per_elem=320, offline_bytes_per_elem=960.0),
}

# FSS gates: one masked reveal per gate layer; heavy lifting is local DCF
# evaluation paid for with single-use keys.
FSS_GATES = {
    "compare": GateCost(rounds=1, bytes_per_elem=8, key_pairs_per_elem=1.0),
    "relu": GateCost(rounds=1, bytes_per_elem=8, key_pairs_per_elem=2.0),
    "mult": GateCost(rounds=1, bytes_per_elem=16, offline_bytes_per_elem=48.0),
    "select": GateCost(rounds=1, bytes_per_elem=8, key_pairs_per_elem=0.5),
    "lut": GateCost(rounds=2, bytes_per_elem=16, key_pairs_per_elem=2.0),
}

# Homomorphic evaluation recipes: ct-ct multiplies and bootstraps consumed
# per ciphertext of nonlinear activations, and rotations per ct-pt multiply
# for the two packing styles.
FHE_RECIPE = {
    "relu_ctct": 8.0, "relu_boot": 0.05,
    "gelu_ctct": 12.0, "gelu_boot": 2.5,
    "softmax_ctct": 24.0, "softmax_boot": 5.0,
    "layernorm_ctct": 12.0, "layernorm_boot": 2.5,
    "conv_rot_per_mul": 24.0,
    "matmul_rot_per_mul": 0.1,
    # fraction of the effective linear ct-pt cost charged to the multiply
    # itself (remainder goes to its rotations)
    "cnn_mul_weight": 0.25,
    "transformer_mul_weight": 0.9,
}

FHE_MEMORY = {
    "limbs": 24,
    "boundary_limbs": 3,
    # resident base footprints (GB): evaluation keys, cached tables
    "cnn_base_gb": 24.0,
    "transformer_base_gb": 15.0,
}

POWER_DEFAULTS = {
    "gpu_heavy": 250.0, "gpu_light": 50.0, "gpu_idle": 6.0,
    "cpu_high": 60.0, "cpu_med": 25.0, "cpu_idle": 16.0,
    "mem_high": 15.0, "mem_med": 5.0, "mem_idle": 3.0,
    "nic_high": 25.0, "nic_med": 10.0, "nic_idle": 5.0,
}

PRICE_DEFAULTS = {
    "instance_per_s": 0.001,
    "storage_per_s_per_5tb": 9.6e-5,
    "fast_port_per_s": 0.0236,
    "transfer_per_gb": 0.02,
    "wan_transit_j_per_gb": 850.0,
}


@dataclass(frozen=True)
class PhaseFit:
    """Fitted latency decomposition for one (model, scheme, phase).

    compute_s / rounds / bytes_per_sample describe a single sample; the
    *128 fields are the per-batch values fitted at batch 128.  Compute is
    interpolated affinely between the two anchors (per-sample GPU work
    shrinks as batching improves utilization); rounds are batch invariant
    and bytes scale linearly per sample.
    """

    compute_s: float
    rounds: float
    bytes_per_sample: float
    compute128_s: float
    rounds128: float
    bytes128: float
    residual: float

    def compute_at(self, batch: int) -> float:
        c_var = (self.compute128_s - self.compute_s) / 127.0
        c_fix = self.compute_s - c_var
        return max(0.0, c_fix + c_var * batch)

    def bytes_at(self, batch: int) -> float:
        return self.bytes_per_sample * batch


class Calibration:
    """Parsed calibration file plus typed accessors."""

    def __init__(self, text: str):
        self.text = text
        parser = configparser.ConfigParser()
        parser.optionxform = str
        parser.read_string(text)
        self._validate(parser)
        self.schema = parser["meta"]["schema"]
        if self.schema != SCHEMA:
            raise ValueError(f"unsupported calibration schema {self.schema!r}")
        self.ring_bits = parser.getint("ring", "bits")
        self.frac_bits = parser.getint("ring", "frac_bits")
        self.fss_lambda = parser.getint("fss", "lambda_bits")
        self.fss_kappa = parser.getfloat("fss", "kappa")
        self.a2b_r0 = parser.getint("a2b", "r0")
        self.a2b_r1 = parser.getint("a2b", "r1")
        self.a2b_c = parser.getfloat("a2b", "c_bytes_per_elem_per_ring_bit")

        self.gates = {}
        for scheme, table in (("a2b", A2B_GATES), ("fss", FSS_GATES)):
            for gate in table:
                sec = parser[f"gate.{scheme}.{gate}"]
                self.gates[(scheme, gate)] = GateCost(
                    rounds=sec.getfloat("rounds"),
                    bytes_per_elem=sec.getfloat("bytes_per_elem"),
                    offline_bytes_per_elem=sec.getfloat("offline_bytes_per_elem", 0.0),
                    key_pairs_per_elem=sec.getfloat("key_pairs_per_elem", 0.0),
                )

        self.slots = parser.getint("fhe", "slots")
        self.fhe_ops = {}
        for family in ("cnn", "transformer"):
            sec = parser[f"fhe.ops.{family}"]
            self.fhe_ops[family] = {
                "ctpt_mul_s": sec.getfloat("ctpt_mul_s"),
                "ctct_mul_s": sec.getfloat("ctct_mul_s"),
                "rotation_s": sec.getfloat("rotation_s"),
                "bootstrap_s": sec.getfloat("bootstrap_s"),
            }
        self.fhe_recipe = {k: parser.getfloat("fhe.recipe", k) for k in FHE_RECIPE}
        self.fhe_memory = {k: parser.getfloat("fhe.memory", k) for k in FHE_MEMORY}

        self.power = {k: parser.getfloat("power", k) for k in POWER_DEFAULTS}
        self.prices = {k: parser.getfloat("prices", k) for k in PRICE_DEFAULTS}

        self.fits = {}
        for (model, scheme, phase) in ref.LATENCY_S:
            sec = parser[f"fit.{model}.{scheme}.{phase}"]
            self.fits[(model, scheme, phase)] = PhaseFit(
                compute_s=sec.getfloat("compute_s"),
                rounds=sec.getfloat("rounds"),
                bytes_per_sample=sec.getfloat("bytes_per_sample"),
                compute128_s=sec.getfloat("compute128_s"),
                rounds128=sec.getfloat("rounds128"),
                bytes128=sec.getfloat("bytes128"),
                residual=sec.getfloat("residual"),
            )

    @staticmethod
    def _validate(parser: configparser.ConfigParser):
        known_fixed = {"meta", "ring", "fss", "a2b", "fhe", "fhe.recipe",
                       "fhe.memory", "power", "prices"}
        for section in parser.sections():
            ok = (section in known_fixed
                  or section.startswith("gate.")
                  or section.startswith("fhe.ops.")
                  or section.startswith("fit."))
            if not ok:
                raise ValueError(f"unknown calibration section [{section}]")

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()

    def gate(self, scheme: str, name: str) -> GateCost:
        return self.gates[(scheme, name)]

    def fit(self, model: str, scheme: str, phase: str) -> PhaseFit:
        try:
            return self.fits[(model, scheme, phase)]
        except KeyError:
            raise ValueError(
                f"no calibrated fit for model={model!r} scheme={scheme!r} phase={phase!r}"
            ) from None


# ---------------------------------------------------------------------------
# Default-file construction
# ---------------------------------------------------------------------------

_FIT_NETS = ("lan_s", "lan_f", "wan_f")  # spans RTT and bandwidth exactly


def _fit_spanning(latencies: dict):
    """Fit on the three spanning presets; report residual over all five."""
    fit = fit_profile([(PRESETS[n], latencies[n]) for n in _FIT_NETS])
    residual = max(abs(fit.predict(PRESETS[n]) - v) / v
                   for n, v in latencies.items())
    return fit, residual


def _fit_reference_row(model, scheme, phase):
    fit1, res1 = _fit_spanning(ref.LATENCY_S[(model, scheme, phase)])
    fit128, res128 = _fit_spanning(
        {n: 128.0 / qps for n, qps in ref.THROUGHPUT_128[(model, scheme, phase)].items()})
    return fit1, fit128, max(res1, res128)


def _solve_fhe_ops():
    """Solve the four per-op latencies so the homomorphic totals reproduce
    the reference constants for all four models exactly."""
    matrix, rhs, meta = [], [], []
    for model in ref.MODELS:
        graph = workload.build_builtin_model(model, 128, 1)
        cnn_mul = tr_mul = ctct = boot = 0.0
        transformer = any(l.kind == "softmax" for l in graph.layers)
        for layer in graph.layers:
            cts = layer.in_elems / SLOTS_PER_CT
            if layer.kind in ("conv2d",):
                cnn_mul += layer.flops() / SLOTS_PER_CT
            elif layer.kind == "matmul" and layer.weight_dims:
                muls = (layer.flops() / 2) / SLOTS_PER_CT
                (tr_mul, cnn_mul) = (tr_mul + muls, cnn_mul) if transformer \
                    else (tr_mul, cnn_mul + muls)
            elif layer.kind == "matmul":
                ctct += (layer.flops() / 2) / SLOTS_PER_CT
            elif layer.kind in ("avgpool", "maxpool"):
                which = "tr_mul" if transformer else "cnn_mul"
                if which == "tr_mul":
                    tr_mul += cts
                else:
                    cnn_mul += cts
            elif layer.kind == "max_reduce":
                continue  # replaced by a constant in the homomorphic pipeline
            elif layer.kind in ("relu", "gelu", "softmax", "layernorm"):
                ctct += cts * FHE_RECIPE[f"{layer.kind}_ctct"]
                boot += cts * FHE_RECIPE[f"{layer.kind}_boot"]
        matrix.append([cnn_mul, tr_mul, ctct, boot])
        rhs.append(ref.FHE_LATENCY_S[model])
        meta.append(model)
    solution = np.linalg.solve(np.array(matrix), np.array(rhs))
    eff_cnn, eff_tr, t_ctct, t_boot = (float(v) for v in solution)
    if min(solution) <= 0:
        raise RuntimeError(f"homomorphic op solve produced non-positive latencies: "
                           f"{dict(zip(['cnn','transformer','ctct','boot'], solution))}")
    ops = {}
    for family, eff in (("cnn", eff_cnn), ("transformer", eff_tr)):
        w = FHE_RECIPE[f"{family}_mul_weight"]
        rot_per_mul = FHE_RECIPE["conv_rot_per_mul" if family == "cnn"
                                 else "matmul_rot_per_mul"]
        ops[family] = {
            "ctpt_mul_s": eff * w,
            "rotation_s": eff * (1 - w) / rot_per_mul,
            "ctct_mul_s": t_ctct,
            "bootstrap_s": t_boot,
        }
    return ops


def build_default_calibration() -> str:
    """Regenerate the default calibration file text from the reference data."""
    out = configparser.ConfigParser()
    out.optionxform = str

    def put(section, values):
        out[section] = {k: repr(v) if isinstance(v, float) else str(v)
                        for k, v in values.items()}

    put("meta", {"schema": SCHEMA})
    put("ring", {"bits": RING_BITS, "frac_bits": FRACTION_BITS})
    put("fss", {"lambda_bits": FSS_LAMBDA, "kappa": 1.0})
    put("a2b", {"r0": 2, "r1": 1,
                "c_bytes_per_elem_per_ring_bit": 373 / 64})

    for scheme, table in (("a2b", A2B_GATES), ("fss", FSS_GATES)):
        for gate, cost in table.items():
            vals = {"rounds": cost.rounds, "bytes_per_elem": cost.bytes_per_elem}
            if cost.offline_bytes_per_elem:
                vals["offline_bytes_per_elem"] = cost.offline_bytes_per_elem
            if cost.key_pairs_per_elem:
                vals["key_pairs_per_elem"] = cost.key_pairs_per_elem
            put(f"gate.{scheme}.{gate}", vals)

    put("fhe", {"slots": SLOTS_PER_CT})
    for family, ops in _solve_fhe_ops().items():
        put(f"fhe.ops.{family}", ops)
    put("fhe.recipe", FHE_RECIPE)
    put("fhe.memory", FHE_MEMORY)
    put("power", POWER_DEFAULTS)
    put("prices", PRICE_DEFAULTS)

    for (model, scheme, phase) in sorted(ref.LATENCY_S):
        fit1, fit128, residual = _fit_reference_row(model, scheme, phase)
        put(f"fit.{model}.{scheme}.{phase}", {
            "compute_s": fit1.compute_s,
            "rounds": fit1.rounds,
            "bytes_per_sample": fit1.online_bytes,
            "compute128_s": fit128.compute_s,
            "rounds128": fit128.rounds,
            "bytes128": fit128.online_bytes,
            "residual": residual,
        })

    buf = io.StringIO()
    out.write(buf)
    return buf.getvalue()


_DEFAULT_CACHE = None


def default_calibration() -> Calibration:
    """The calibration shipped with the package (cached, immutable)."""
    global _DEFAULT_CACHE
    if _DEFAULT_CACHE is None:
        text = (importlib.resources.files("ppmlsim.data")
                .joinpath("default_calibration.ini").read_text())
        _DEFAULT_CACHE = Calibration(text)
    return _DEFAULT_CACHE


def load_calibration(path) -> Calibration:
    with open(path) as fh:
        return Calibration(fh.read())
