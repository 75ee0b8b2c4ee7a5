"""Executable desk-scale two-party protocol kernels.

Everything runs in one process over an instrumented in-memory channel; the
point is to ground the analytic round/byte formulas in real protocol runs,
not to provide network security.  The trusted dealer hands out all
correlated randomness (semi-honest preprocessing model) and every piece of
it is single use.
"""

from .ring import (RING_BITS, RING_MASK, FRACTION_BITS, encode_fixed,
                   decode_fixed, rand_ring)
from .channel import Channel, ChannelStats
from .sharing import Share, share, reconstruct
from .beaver import BeaverTriple, beaver_mul
from .dealer import Dealer
from .compare import (a2b_compare, a2b_compare_rounds, a2b_compare_round_bits,
                      a2b_compare_wire_bytes)
from .fss import (DpfKey, DcfKey, dpf_keygen, dpf_eval, dpf_eval_all,
                  dcf_keygen, dcf_eval, dcf_eval_all,
                  dpf_key_bytes, dcf_key_bytes, dcf_pair_bytes,
                  serialize_key, deserialize_key)
from .relu import fss_relu, ReluKeys

__all__ = [
    "RING_BITS", "RING_MASK", "FRACTION_BITS", "encode_fixed", "decode_fixed",
    "rand_ring", "Channel", "ChannelStats", "Share", "share", "reconstruct",
    "BeaverTriple", "beaver_mul", "Dealer", "a2b_compare",
    "a2b_compare_rounds", "a2b_compare_round_bits", "a2b_compare_wire_bytes",
    "DpfKey", "DcfKey", "dpf_keygen", "dpf_eval", "dpf_eval_all",
    "dcf_keygen", "dcf_eval", "dcf_eval_all", "dpf_key_bytes",
    "dcf_key_bytes", "dcf_pair_bytes", "serialize_key", "deserialize_key",
    "fss_relu", "ReluKeys",
]
