"""Bundled reference measurements used to calibrate the default cost models.

These are published end-to-end benchmark numbers for representative
implementations of the three private-inference approaches (an arithmetic/
binary-conversion MPC stack, an FSS-based MPC stack, and GPU CKKS FHE
backends for CNNs and Transformers) on a machine with one A6000-class GPU,
recorded across the five link tiers in `netmodel.PRESETS`.

LATENCY_S holds per-sample latency at batch size 1.  THROUGHPUT_128 holds
samples/second measured at batch 128 for the MPC schemes and batch 1 for
FHE.  "onoff" rows include the offline phase (triple/key generation and
shipping); "online" rows assume preprocessing is already in place.  FHE
values for bert_base and resnet50 are extrapolated estimates in the
original source, not direct measurements.
"""

MODELS = ("bert_tiny", "bert_base", "resnet20", "resnet50")
MPC_SCHEMES = ("a2b", "fss")
PHASES = ("online", "onoff")

# (model, scheme, phase) -> {net: seconds per sample, batch 1}
LATENCY_S = {
    ("bert_tiny", "fss", "onoff"):  {"lan_s": 0.84, "lan_f": 0.39, "wan_s": 12.0, "wan_m": 6.2, "wan_f": 5.7},
    ("bert_tiny", "a2b", "onoff"):  {"lan_s": 0.24, "lan_f": 0.15, "wan_s": 33.0, "wan_m": 32.0, "wan_f": 32.0},
    ("bert_tiny", "fss", "online"): {"lan_s": 0.29, "lan_f": 0.26, "wan_s": 6.0, "wan_m": 5.6, "wan_f": 5.6},
    ("bert_tiny", "a2b", "online"): {"lan_s": 0.23, "lan_f": 0.15, "wan_s": 33.0, "wan_m": 32.0, "wan_f": 32.0},

    ("bert_base", "fss", "onoff"):  {"lan_s": 24.0, "lan_f": 5.9, "wan_s": 301.0, "wan_m": 55.0, "wan_f": 38.0},
    ("bert_base", "a2b", "onoff"):  {"lan_s": 9.1, "lan_f": 5.3, "wan_s": 243.0, "wan_m": 187.0, "wan_f": 183.0},
    ("bert_base", "fss", "online"): {"lan_s": 2.3, "lan_f": 1.3, "wan_s": 47.0, "wan_m": 34.0, "wan_f": 33.0},
    ("bert_base", "a2b", "online"): {"lan_s": 8.2, "lan_f": 5.2, "wan_s": 232.0, "wan_m": 186.0, "wan_f": 182.0},

    ("resnet20", "fss", "onoff"):  {"lan_s": 0.21, "lan_f": 0.053, "wan_s": 9.4, "wan_m": 7.1, "wan_f": 7.0},
    ("resnet20", "a2b", "onoff"):  {"lan_s": 0.074, "lan_f": 0.034, "wan_s": 14.0, "wan_m": 14.0, "wan_f": 14.0},
    ("resnet20", "fss", "online"): {"lan_s": 0.024, "lan_f": 0.017, "wan_s": 7.0, "wan_m": 6.9, "wan_f": 6.9},
    ("resnet20", "a2b", "online"): {"lan_s": 0.058, "lan_f": 0.033, "wan_s": 14.0, "wan_m": 14.0, "wan_f": 14.0},

    ("resnet50", "fss", "onoff"):  {"lan_s": 15.0, "lan_f": 5.4, "wan_s": 168.0, "wan_m": 29.0, "wan_f": 20.0},
    ("resnet50", "a2b", "onoff"):  {"lan_s": 2.5, "lan_f": 0.99, "wan_s": 59.0, "wan_m": 37.0, "wan_f": 36.0},
    ("resnet50", "fss", "online"): {"lan_s": 1.0, "lan_f": 0.84, "wan_s": 18.0, "wan_m": 16.0, "wan_f": 16.0},
    ("resnet50", "a2b", "online"): {"lan_s": 2.2, "lan_f": 0.97, "wan_s": 55.0, "wan_m": 37.0, "wan_f": 36.0},
}

# model -> constant FHE latency in seconds (network independent)
FHE_LATENCY_S = {
    "bert_tiny": 4.0,
    "bert_base": 149.0,   # extrapolated estimate
    "resnet20": 1.7,
    "resnet50": 164.0,    # extrapolated estimate
}

# (model, scheme, phase) -> {net: samples/s at batch 128}
THROUGHPUT_128 = {
    ("bert_tiny", "fss", "onoff"):  {"lan_s": 1.6, "lan_f": 6.3, "wan_s": 0.15, "wan_m": 1.5, "wan_f": 5.0},
    ("bert_tiny", "a2b", "onoff"):  {"lan_s": 4.6, "lan_f": 7.8, "wan_s": 0.58, "wan_m": 2.1, "wan_f": 2.7},
    ("bert_tiny", "fss", "online"): {"lan_s": 17.0, "lan_f": 31.0, "wan_s": 2.2, "wan_m": 10.0, "wan_f": 14.0},
    ("bert_tiny", "a2b", "online"): {"lan_s": 4.7, "lan_f": 7.9, "wan_s": 0.61, "wan_m": 2.2, "wan_f": 2.7},

    ("bert_base", "fss", "onoff"):  {"lan_s": 0.04, "lan_f": 0.18, "wan_s": 0.003, "wan_m": 0.042, "wan_f": 0.17},
    ("bert_base", "a2b", "onoff"):  {"lan_s": 0.17, "lan_f": 0.45, "wan_s": 0.017, "wan_m": 0.14, "wan_f": 0.28},
    ("bert_base", "fss", "online"): {"lan_s": 0.50, "lan_f": 0.93, "wan_s": 0.07, "wan_m": 0.44, "wan_f": 0.75},
    ("bert_base", "a2b", "online"): {"lan_s": 0.20, "lan_f": 0.49, "wan_s": 0.02, "wan_m": 0.15, "wan_f": 0.29},

    ("resnet20", "fss", "onoff"):  {"lan_s": 4.9, "lan_f": 24.0, "wan_s": 0.40, "wan_m": 3.9, "wan_f": 10.0},
    ("resnet20", "a2b", "onoff"):  {"lan_s": 16.0, "lan_f": 41.0, "wan_s": 1.4, "wan_m": 5.9, "wan_f": 7.6},
    ("resnet20", "fss", "online"): {"lan_s": 53.0, "lan_f": 83.0, "wan_s": 6.0, "wan_m": 13.0, "wan_f": 15.0},
    ("resnet20", "a2b", "online"): {"lan_s": 21.0, "lan_f": 43.0, "wan_s": 2.0, "wan_m": 6.4, "wan_f": 7.7},

    ("resnet50", "fss", "onoff"):  {"lan_s": 0.07, "lan_f": 0.23, "wan_s": 0.007, "wan_m": 0.070, "wan_f": 0.22},
    ("resnet50", "a2b", "onoff"):  {"lan_s": 0.40, "lan_f": 1.0, "wan_s": 0.04, "wan_m": 0.36, "wan_f": 0.81},
    ("resnet50", "fss", "online"): {"lan_s": 0.99, "lan_f": 1.2, "wan_s": 0.28, "wan_m": 0.89, "wan_f": 1.1},
    ("resnet50", "a2b", "online"): {"lan_s": 0.45, "lan_f": 1.1, "wan_s": 0.05, "wan_m": 0.40, "wan_f": 0.82},
}

# model -> FHE samples/s (batch 1, network independent)
FHE_THROUGHPUT = {
    "bert_tiny": 0.25,
    "bert_base": 0.007,
    "resnet20": 0.60,
    "resnet50": 0.006,
}

# Peak resident memory in GB observed for each scheme (batch 1), used to
# anchor the coarse memory model.  FHE values are GPU-side; MPC values are
# (cpu, gpu) pairs.
PEAK_MEMORY_GB = {
    ("bert_tiny", "a2b"): (0.65, 0.1),
    ("bert_base", "a2b"): (0.71, 4.0),
    ("resnet20", "a2b"): (0.49, 0.9),
    ("resnet50", "a2b"): (0.53, 2.0),
    ("bert_tiny", "fss"): (4.2, 0.4),
    ("bert_base", "fss"): (18.9, 1.8),
    ("resnet20", "fss"): (3.6, 0.3),
    ("resnet50", "fss"): (11.7, 2.5),
    ("bert_tiny", "fhe"): (0.0, 18.6),
    ("resnet20", "fhe"): (0.0, 28.0),
}
