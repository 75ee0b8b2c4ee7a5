"""Tree-based function shares: distributed point and comparison functions.

Standard GGM construction: a key is a root seed plus one correction word
per level; the two keys' full-domain evaluations sum to beta*[x == alpha]
(point function) or beta*[x < alpha] (comparison function) over Z_{2^64}^m
payloads.  Keygen and eval are vectorized both across independent keys and
across evaluation points, so whole layers of gates cost a handful of AES
passes per tree level.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .prg import expand, seeds_from_rng

_CONVERT_TWEAK = np.uint64(0xD1B54A32D192ED03)
_ONE = np.uint64(1)

MAX_DOMAIN_BITS = 64
MAX_EVAL_ALL_BITS = 20  # desk scale: full-domain expansion cap

_MAGIC = {"dpf": b"DPF1", "dcf": b"DCF1"}
_VERSION = 1


def _convert(seeds: np.ndarray, words: int) -> np.ndarray:
    """Map seeds to (E, words) ring elements, domain-separated from expand."""
    blocks = expand(seeds ^ _CONVERT_TWEAK, (words + 1) // 2)
    flat = blocks.reshape(blocks.shape[0], -1)
    return flat[:, :words]


def _split(expanded: np.ndarray):
    """Children of a batch expansion: seeds with control bits stripped."""
    s_l = expanded[:, 0, :].copy()
    s_r = expanded[:, 1, :].copy()
    t_l = (s_l[:, 0] & _ONE).astype(np.uint8)
    t_r = (s_r[:, 0] & _ONE).astype(np.uint8)
    s_l[:, 0] &= ~_ONE
    s_r[:, 0] &= ~_ONE
    return s_l, t_l, s_r, t_r


_MINUS_ONE = np.uint64(0xFFFFFFFFFFFFFFFF)


def _neg_where(values: np.ndarray, flag: np.ndarray) -> np.ndarray:
    """values with entries negated (mod 2^64) where flag is set."""
    flag = flag.astype(bool)
    sign = np.where(flag[..., None] if values.ndim > flag.ndim else flag,
                    _MINUS_ONE, _ONE)
    return values * sign


@dataclass
class _KeyBatch:
    """Vectorized bundle of E independent keys for one party."""

    kind: str            # "dpf" | "dcf"
    party: int
    domain_bits: int
    payload_words: int
    root_seed: np.ndarray    # (E, 2)
    cw_seed: np.ndarray      # (E, n, 2)
    cw_t: np.ndarray         # (E, n) packed t_l | t_r<<1
    cw_value: np.ndarray     # (E, n, m) for dcf, empty for dpf
    cw_final: np.ndarray     # (E, m)

    def __len__(self):
        return self.root_seed.shape[0]

    def key(self, i: int):
        cls = DpfKey if self.kind == "dpf" else DcfKey
        return cls(self.party, self.domain_bits, self.payload_words,
                   self.root_seed[i].copy(), self.cw_seed[i].copy(),
                   self.cw_t[i].copy(),
                   self.cw_value[i].copy() if self.kind == "dcf" else None,
                   self.cw_final[i].copy())


@dataclass
class DpfKey:
    """One party's share of a point function beta*[x == alpha]."""
    party: int
    domain_bits: int
    payload_words: int
    root_seed: np.ndarray
    cw_seed: np.ndarray
    cw_t: np.ndarray
    cw_value: object  # unused, kept symmetric with DcfKey
    cw_final: np.ndarray

    kind = "dpf"

    def as_batch(self) -> _KeyBatch:
        return _KeyBatch(self.kind, self.party, self.domain_bits,
                         self.payload_words, self.root_seed[None],
                         self.cw_seed[None], self.cw_t[None],
                         np.zeros((1, self.domain_bits, 0), np.uint64)
                         if self.cw_value is None else self.cw_value[None],
                         self.cw_final[None])


@dataclass
class DcfKey(DpfKey):
    """One party's share of a comparison function beta*[x < alpha]."""
    kind = "dcf"


def _check_domain(n: int, eval_all: bool = False):
    cap = MAX_EVAL_ALL_BITS if eval_all else MAX_DOMAIN_BITS
    if not 1 <= n <= cap:
        raise ValueError(f"domain_bits must be in [1, {cap}], got {n}")


def _prep(alpha, beta, domain_bits, payload_words):
    alpha = np.atleast_1d(np.asarray(alpha, dtype=np.uint64))
    beta = np.asarray(beta, dtype=np.uint64)
    if beta.ndim <= 1 and payload_words == 1:
        beta = np.atleast_1d(beta).reshape(-1, 1)
    beta = np.broadcast_to(beta, (alpha.shape[0], payload_words)).copy()
    if domain_bits < 64 and np.any(alpha >> np.uint64(domain_bits)):
        raise ValueError("alpha does not fit in domain_bits")
    return alpha, beta


def keygen_batch(kind: str, alpha, beta, domain_bits: int,
                 rng: np.random.Generator, payload_words: int = 1):
    """Generate E independent key pairs at once; returns two _KeyBatch."""
    _check_domain(domain_bits)
    alpha, beta = _prep(alpha, beta, domain_bits, payload_words)
    n, m, E = domain_bits, payload_words, alpha.shape[0]
    is_dcf = kind == "dcf"

    s0, s1 = seeds_from_rng(rng, E), seeds_from_rng(rng, E)
    root0, root1 = s0.copy(), s1.copy()
    t0 = np.zeros(E, np.uint8)
    t1 = np.ones(E, np.uint8)
    cw_seed = np.zeros((E, n, 2), np.uint64)
    cw_t = np.zeros((E, n), np.uint8)
    cw_value = np.zeros((E, n, m if is_dcf else 0), np.uint64)
    v_alpha = np.zeros((E, m), np.uint64)

    for lvl in range(n):
        abit = ((alpha >> np.uint64(n - 1 - lvl)) & _ONE).astype(np.uint8)
        e0, e1 = expand(s0, 2), expand(s1, 2)
        s0l, t0l, s0r, t0r = _split(e0)
        s1l, t1l, s1r, t1r = _split(e1)

        keep_is_r = abit.astype(bool)
        # lose side seeds: the side off the alpha path
        s0_lose = np.where(keep_is_r[:, None], s0l, s0r)
        s1_lose = np.where(keep_is_r[:, None], s1l, s1r)
        scw = s0_lose ^ s1_lose

        if is_dcf:
            v0 = np.stack([_convert(s0l, m), _convert(s0r, m)], axis=1)  # (E,2,m)
            v1 = np.stack([_convert(s1l, m), _convert(s1r, m)], axis=1)
            lose_idx = np.where(keep_is_r, 0, 1)
            keep_idx = 1 - lose_idx
            take = lambda v, idx: np.take_along_axis(v, idx[:, None, None], 1)[:, 0, :]
            vcw = _neg_where(take(v1, lose_idx) - take(v0, lose_idx) - v_alpha, t1)
            # when alpha's bit is 1, everything under the lose (left) child
            # is below alpha and must carry beta
            vcw = vcw + _neg_where(np.where(keep_is_r[:, None], beta, np.uint64(0)), t1)
            v_alpha = v_alpha - take(v1, keep_idx) + take(v0, keep_idx) \
                + _neg_where(vcw, t1)
            cw_value[:, lvl, :] = vcw

        tcw_l = t0l ^ t1l ^ abit ^ 1
        tcw_r = t0r ^ t1r ^ abit
        cw_seed[:, lvl] = scw
        cw_t[:, lvl] = tcw_l | (tcw_r << 1)

        s0_keep = np.where(keep_is_r[:, None], s0r, s0l)
        s1_keep = np.where(keep_is_r[:, None], s1r, s1l)
        t0_keep = np.where(keep_is_r, t0r, t0l)
        t1_keep = np.where(keep_is_r, t1r, t1l)
        tcw_keep = np.where(keep_is_r, tcw_r, tcw_l)
        mask0 = (t0 == 1)
        mask1 = (t1 == 1)
        s0 = s0_keep ^ np.where(mask0[:, None], scw, np.uint64(0))
        s1 = s1_keep ^ np.where(mask1[:, None], scw, np.uint64(0))
        t0 = t0_keep ^ (t0 & tcw_keep)
        t1 = t1_keep ^ (t1 & tcw_keep)

    conv0, conv1 = _convert(s0, m), _convert(s1, m)
    if is_dcf:
        cw_final = _neg_where(conv1 - conv0 - v_alpha, t1)
    else:
        cw_final = _neg_where(beta - conv0 + conv1, t1)

    mk = lambda party, root: _KeyBatch(kind, party, n, m, root, cw_seed.copy(),
                                       cw_t.copy(), cw_value.copy(), cw_final.copy())
    return mk(0, root0), mk(1, root1)


def eval_batch(batch: _KeyBatch, x) -> np.ndarray:
    """Evaluate key i at point x[i]; returns (E, payload_words) shares."""
    x = np.atleast_1d(np.asarray(x, dtype=np.uint64))
    E, n, m = len(batch), batch.domain_bits, batch.payload_words
    if x.shape[0] != E:
        raise ValueError(f"need one point per key: {x.shape[0]} points, {E} keys")
    is_dcf = batch.kind == "dcf"
    s = batch.root_seed.copy()
    t = np.full(E, batch.party, np.uint8)
    value = np.zeros((E, m), np.uint64)

    for lvl in range(n):
        e = expand(s, 2)
        sl_raw, tl, sr_raw, tr = _split(e)
        scw = batch.cw_seed[:, lvl]
        tcw_l = batch.cw_t[:, lvl] & 1
        tcw_r = batch.cw_t[:, lvl] >> 1
        on = (t == 1)
        xbit = ((x >> np.uint64(n - 1 - lvl)) & _ONE).astype(bool)
        if is_dcf:
            # the additive contribution converts the raw expansion children;
            # seed corrections are reconciled through cw_value instead
            v_here = np.where(xbit[:, None], _convert(sr_raw, m),
                              _convert(sl_raw, m))
            value = value + v_here + np.where(
                on[:, None], batch.cw_value[:, lvl], np.uint64(0))
        corr = np.where(on[:, None], scw, np.uint64(0))
        sl = sl_raw ^ corr
        sr = sr_raw ^ corr
        tl = tl ^ (t & tcw_l)
        tr = tr ^ (t & tcw_r)
        s = np.where(xbit[:, None], sr, sl)
        t = np.where(xbit, tr, tl)

    leaf = _convert(s, m) + np.where((t == 1)[:, None], batch.cw_final, np.uint64(0))
    value = value + leaf
    return _neg_where(value, np.full(E, batch.party, np.uint8))


def eval_all_batch(batch: _KeyBatch, index: int = 0) -> np.ndarray:
    """Full-domain evaluation of one key from a batch: (2^n, payload_words)."""
    n, m = batch.domain_bits, batch.payload_words
    _check_domain(n, eval_all=True)
    is_dcf = batch.kind == "dcf"
    s = batch.root_seed[index][None].copy()
    t = np.array([batch.party], np.uint8)
    value = np.zeros((1, m), np.uint64)

    for lvl in range(n):
        e = expand(s, 2)
        sl_raw, tl, sr_raw, tr = _split(e)
        scw = batch.cw_seed[index, lvl][None]
        tcw_l = batch.cw_t[index, lvl] & 1
        tcw_r = batch.cw_t[index, lvl] >> 1
        on = (t == 1)
        corr = np.where(on[:, None], scw, np.uint64(0))
        sl = sl_raw ^ corr
        sr = sr_raw ^ corr
        tl = tl ^ (t & tcw_l)
        tr = tr ^ (t & tcw_r)
        # interleave children so the leaf order equals the integer order
        count = s.shape[0]
        s_new = np.empty((2 * count, 2), np.uint64)
        t_new = np.empty(2 * count, np.uint8)
        s_new[0::2], s_new[1::2] = sl, sr
        t_new[0::2], t_new[1::2] = tl, tr
        if is_dcf:
            v_add = np.empty((2 * count, m), np.uint64)
            v_add[0::2] = _convert(sl_raw, m)
            v_add[1::2] = _convert(sr_raw, m)
            v_corr = np.repeat(np.where(on[:, None],
                                        batch.cw_value[index, lvl][None],
                                        np.uint64(0)), 2, axis=0)
            value = np.repeat(value, 2, axis=0) + v_add + v_corr
        else:
            value = np.repeat(value, 2, axis=0)
        s, t = s_new, t_new

    leaf = _convert(s, m) + np.where((t == 1)[:, None],
                                     batch.cw_final[index][None], np.uint64(0))
    value = value + leaf
    return _neg_where(value, np.full(s.shape[0], batch.party, np.uint8))


# ---------------------------------------------------------------------------
# Scalar convenience API
# ---------------------------------------------------------------------------

def _as_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def dpf_keygen(alpha: int, beta: int, domain_bits: int, seed):
    """Share the point function beta*[x == alpha]; deterministic given seed."""
    b0, b1 = keygen_batch("dpf", alpha, beta, domain_bits, _as_rng(seed))
    return b0.key(0), b1.key(0)


def dcf_keygen(alpha: int, beta: int, domain_bits: int, seed):
    """Share the comparison function beta*[x < alpha]."""
    b0, b1 = keygen_batch("dcf", alpha, beta, domain_bits, _as_rng(seed))
    return b0.key(0), b1.key(0)


def _eval_points(key, x):
    x = np.atleast_1d(np.asarray(x, dtype=np.uint64))
    batch = key.as_batch()
    rep = _KeyBatch(batch.kind, batch.party, batch.domain_bits, batch.payload_words,
                    np.repeat(batch.root_seed, x.shape[0], 0),
                    np.repeat(batch.cw_seed, x.shape[0], 0),
                    np.repeat(batch.cw_t, x.shape[0], 0),
                    np.repeat(batch.cw_value, x.shape[0], 0),
                    np.repeat(batch.cw_final, x.shape[0], 0))
    return eval_batch(rep, x)


def dpf_eval(key: DpfKey, x):
    """Share of beta*[x == alpha]; scalar x -> scalar, array x -> array."""
    out = _eval_points(key, x)
    return out[0, 0] if np.isscalar(x) or np.ndim(x) == 0 else out[:, 0]


def dcf_eval(key: DcfKey, x):
    out = _eval_points(key, x)
    return out[0, 0] if np.isscalar(x) or np.ndim(x) == 0 else out[:, 0]


def dpf_eval_all(key: DpfKey) -> np.ndarray:
    return eval_all_batch(key.as_batch())[:, 0]


def dcf_eval_all(key: DcfKey) -> np.ndarray:
    return eval_all_batch(key.as_batch())[:, 0]


# ---------------------------------------------------------------------------
# Serialization: little-endian fixed-width records
# ---------------------------------------------------------------------------

def dpf_key_bytes(domain_bits: int, payload_words: int = 1) -> int:
    """Serialized size of one point-function key."""
    return 25 + 17 * domain_bits + 8 * payload_words


def dcf_key_bytes(domain_bits: int, payload_words: int = 1) -> int:
    """Serialized size of one comparison-function key."""
    return 25 + (17 + 8 * payload_words) * domain_bits + 8 * payload_words


def dcf_pair_bytes(domain_bits: int, payload_words: int = 1) -> int:
    return 2 * dcf_key_bytes(domain_bits, payload_words)


def serialize_key(key) -> bytes:
    parts = [_MAGIC[key.kind], struct.pack("<HBBB", _VERSION, key.party,
                                           key.domain_bits, key.payload_words)]
    parts.append(key.root_seed.astype("<u8").tobytes())
    for lvl in range(key.domain_bits):
        parts.append(key.cw_seed[lvl].astype("<u8").tobytes())
        parts.append(struct.pack("<B", int(key.cw_t[lvl])))
        if key.kind == "dcf":
            parts.append(key.cw_value[lvl].astype("<u8").tobytes())
    parts.append(key.cw_final.astype("<u8").tobytes())
    return b"".join(parts)


def deserialize_key(data: bytes):
    magic, rest = data[:4], data[4:]
    kinds = {v: k for k, v in _MAGIC.items()}
    if magic not in kinds:
        raise ValueError(f"bad key magic {magic!r}")
    kind = kinds[magic]
    version, party, n, m = struct.unpack("<HBBB", rest[:5])
    if version != _VERSION:
        raise ValueError(f"unsupported key version {version}")
    expected = (dpf_key_bytes if kind == "dpf" else dcf_key_bytes)(n, m)
    if len(data) != expected:
        raise ValueError(f"key record is {len(data)} bytes, expected {expected}")
    off = 9
    take = lambda nb: data[off:off + nb]
    root = np.frombuffer(take(16), "<u8").astype(np.uint64); off += 16
    cw_seed = np.zeros((n, 2), np.uint64)
    cw_t = np.zeros(n, np.uint8)
    cw_value = np.zeros((n, m), np.uint64) if kind == "dcf" else None
    for lvl in range(n):
        cw_seed[lvl] = np.frombuffer(take(16), "<u8"); off += 16
        cw_t[lvl] = data[off]; off += 1
        if kind == "dcf":
            cw_value[lvl] = np.frombuffer(take(8 * m), "<u8"); off += 8 * m
    cw_final = np.frombuffer(take(8 * m), "<u8").astype(np.uint64); off += 8 * m
    cls = DpfKey if kind == "dpf" else DcfKey
    return cls(party, n, m, root, cw_seed, cw_t, cw_value, cw_final)
