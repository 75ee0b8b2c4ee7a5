"""Inference workloads as ordered layer graphs.

A model is a flat list of layers carrying shapes only; there are no tensors
or weights here.  From the shapes we derive the quantities every cost model
downstream consumes: FLOPs, nonlinear element counts, and activation volume.

FLOP conventions follow the numbers each model family is normally quoted
with: convolutions count one unit per multiply-accumulate, dense/matmul
layers count two.  Mixing the two conventions is deliberate; it reproduces
the widely published per-model totals (ResNet-50 ~4.1G, BERT-Base ~22G at
128 tokens) that the calibrated cost models are anchored to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

RING_BYTES = 8          # 64-bit ring elements
FRACTION_BITS = 16      # fixed-point scale used for activation volume

LINEAR_KINDS = ("matmul", "conv2d")
POOL_KINDS = ("maxpool", "avgpool")
NONLINEAR_KINDS = ("relu", "maxpool", "softmax", "max_reduce", "layernorm", "gelu")
ALL_KINDS = LINEAR_KINDS + POOL_KINDS + ("relu", "softmax", "max_reduce", "layernorm", "gelu")

# Elementwise kinds consume exactly what the previous layer produced, which
# is the only adjacency constraint a flat layer list can honestly enforce.
ELEMENTWISE_KINDS = ("relu", "softmax", "max_reduce", "layernorm", "gelu")


def _prod(dims) -> int:
    out = 1
    for d in dims:
        out *= d
    return out


@dataclass(frozen=True)
class LayerSpec:
    """Shape record for one layer.

    input_dims/output_dims describe the activation tensors.  weight_dims is
    empty for every nonlinear kind and for activation-by-activation matmuls
    (attention scores/apply), where the right operand is another activation
    of shape input_dims[:-2] + [k, n] inferred from input/output.
    """

    kind: str
    input_dims: tuple
    output_dims: tuple
    weight_dims: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        for dims, label in ((self.input_dims, "input"), (self.output_dims, "output"),
                            (self.weight_dims, "weight")):
            if any((not isinstance(d, int)) or d < 1 for d in dims):
                raise ValueError(f"{label}_dims must be positive integers, got {dims}")
        if self.kind in NONLINEAR_KINDS and self.kind != "maxpool" and self.weight_dims:
            raise ValueError(f"{self.kind} layers carry no weights")
        if self.kind in ("relu", "gelu", "softmax", "max_reduce", "layernorm"):
            if _prod(self.input_dims) != _prod(self.output_dims):
                raise ValueError(f"{self.kind} must preserve element count")
        if self.kind == "conv2d":
            if len(self.input_dims) != 4 or len(self.output_dims) != 4 or len(self.weight_dims) != 4:
                raise ValueError("conv2d needs 4-d input/output/weight dims")
            cout, cin, _, _ = self.weight_dims
            if self.input_dims[1] != cin or self.output_dims[1] != cout:
                raise ValueError("conv2d channel mismatch between dims and weights")
        if self.kind == "matmul" and self.weight_dims:
            if len(self.weight_dims) != 2 or self.input_dims[-1] != self.weight_dims[0]:
                raise ValueError("matmul weight dims must be (k, n) matching input k")
            if self.output_dims[-1] != self.weight_dims[1]:
                raise ValueError("matmul output dim must match weight n")

    @property
    def in_elems(self) -> int:
        return _prod(self.input_dims)

    @property
    def out_elems(self) -> int:
        return _prod(self.output_dims)

    @property
    def weight_elems(self) -> int:
        return _prod(self.weight_dims) if self.weight_dims else 0

    @property
    def rhs_elems(self) -> int:
        """Element count of the second operand (weights, or the inferred
        activation operand for weightless matmuls)."""
        if self.kind == "matmul" and not self.weight_dims:
            k = self.input_dims[-1]
            n = self.output_dims[-1]
            return _prod(self.input_dims[:-2]) * k * n
        return self.weight_elems

    @property
    def window(self) -> int:
        """Reduction window: softmax/max/layernorm rows, pooling receptive field."""
        if self.kind in ("softmax", "max_reduce", "layernorm"):
            return self.input_dims[-1]
        if self.kind in POOL_KINDS:
            hin, win = self.input_dims[-2], self.input_dims[-1]
            hout, wout = self.output_dims[-2], self.output_dims[-1]
            return max(1, (hin // hout) * (win // wout))
        return 1

    def flops(self) -> int:
        """Operation count under the per-family conventions in the module docstring."""
        if self.kind == "matmul":
            k = self.input_dims[-1]
            return 2 * self.out_elems * k
        if self.kind == "conv2d":
            _, cin, kh, kw = self.weight_dims
            return self.out_elems * cin * kh * kw
        if self.kind in POOL_KINDS:
            return self.in_elems
        return self.in_elems  # elementwise kinds: one op per element

    def nonlinear_elems(self) -> int:
        return self.in_elems if self.kind in NONLINEAR_KINDS else 0


@dataclass
class OpCounts:
    """Aggregate operation demand of a graph; additive under concatenation."""

    flops: int = 0
    nonlinear_elems: dict = field(default_factory=dict)
    activation_bytes: int = 0

    def __add__(self, other: "OpCounts") -> "OpCounts":
        merged = dict(self.nonlinear_elems)
        for k, v in other.nonlinear_elems.items():
            merged[k] = merged.get(k, 0) + v
        return OpCounts(self.flops + other.flops, merged,
                        self.activation_bytes + other.activation_bytes)

    @property
    def total_nonlinear(self) -> int:
        return sum(self.nonlinear_elems.values())


@dataclass
class ModelGraph:
    """An ordered layer list plus the bookkeeping the cost models need.

    extra_param_count holds weights that exist in the full model but not as
    graph layers (token/position embedding tables and the pooler head for
    the BERT variants; lookups are assumed to happen client side), so that
    param_count reflects the full published parameter total.
    """

    name: str
    layers: list
    batch: int = 1
    seq_len: int = 1
    extra_param_count: int = 0

    def __post_init__(self):
        if self.batch < 1 or self.seq_len < 1:
            raise ValueError("batch and seq_len must be >= 1")
        self.validate()

    def validate(self):
        prev = None
        for i, layer in enumerate(self.layers):
            if prev is not None and layer.kind in ELEMENTWISE_KINDS:
                if layer.in_elems != prev.out_elems:
                    raise ValueError(
                        f"layer {i} ({layer.kind}) consumes {layer.in_elems} elems "
                        f"but layer {i-1} produced {prev.out_elems}"
                    )
            prev = layer

    @property
    def graph_weight_count(self) -> int:
        return sum(l.weight_elems for l in self.layers)

    @property
    def param_count(self) -> int:
        return self.graph_weight_count + self.extra_param_count

    def scaled_to_batch(self, batch: int) -> "ModelGraph":
        """Same architecture with the leading batch dimension replaced."""
        if batch == self.batch:
            return self
        if batch < 1:
            raise ValueError("batch must be >= 1")
        new_layers = []
        for l in self.layers:
            def rebatch(dims):
                if not dims:
                    return dims
                lead = dims[0]
                if lead % self.batch:
                    raise ValueError(f"cannot rebatch dims {dims} from batch {self.batch}")
                return ((lead // self.batch) * batch,) + tuple(dims[1:])
            new_layers.append(replace(l, input_dims=rebatch(l.input_dims),
                                      output_dims=rebatch(l.output_dims)))
        return ModelGraph(self.name, new_layers, batch, self.seq_len,
                          self.extra_param_count)


def model_op_counts(graph: ModelGraph) -> OpCounts:
    """Sum per-layer FLOPs, nonlinear element counts and activation volume."""
    counts = OpCounts()
    for layer in graph.layers:
        nl = {}
        if layer.nonlinear_elems():
            nl[layer.kind] = layer.nonlinear_elems()
        counts = counts + OpCounts(layer.flops(), nl, layer.out_elems * RING_BYTES)
    return counts


# ---------------------------------------------------------------------------
# Builtin models
# ---------------------------------------------------------------------------

_BERT_CONFIGS = {
    # layers, hidden, heads, intermediate
    "bert_tiny": (2, 128, 2, 512),
    "bert_base": (12, 768, 12, 3072),
}
_BERT_VOCAB = 30522
_BERT_MAX_POS = 512
_BERT_TYPES = 2

_RESNET_CIFAR_STAGES = ((16, 32), (32, 16), (64, 8))  # (channels, spatial) per stage


def build_bert(name: str, seq_len: int, batch: int, include_max: bool = True) -> ModelGraph:
    """Encoder-only BERT graph.

    include_max inserts the numerical-stability max reduction in front of
    every softmax, the form the interactive protocols evaluate.  The
    homomorphic pipeline substitutes a constant for it and simply skips
    max_reduce layers when costing.
    """
    n_layers, hidden, heads, inter = _BERT_CONFIGS[name]
    dh = hidden // heads
    b, n = batch, seq_len
    layers = []
    for i in range(n_layers):
        p = f"enc{i}."
        layers += [
            LayerSpec("matmul", (b * n, hidden), (b * n, 3 * hidden),
                      (hidden, 3 * hidden), name=p + "qkv"),
            LayerSpec("matmul", (b * heads, n, dh), (b * heads, n, n),
                      name=p + "attn_scores"),
        ]
        if include_max:
            layers.append(LayerSpec("max_reduce", (b * heads, n, n), (b * heads, n, n),
                                    name=p + "attn_max"))
        layers += [
            LayerSpec("softmax", (b * heads, n, n), (b * heads, n, n),
                      name=p + "attn_softmax"),
            LayerSpec("matmul", (b * heads, n, n), (b * heads, n, dh),
                      name=p + "attn_apply"),
            LayerSpec("matmul", (b * n, hidden), (b * n, hidden),
                      (hidden, hidden), name=p + "attn_out"),
            LayerSpec("layernorm", (b * n, hidden), (b * n, hidden), name=p + "ln1"),
            LayerSpec("matmul", (b * n, hidden), (b * n, inter),
                      (hidden, inter), name=p + "ff1"),
            LayerSpec("gelu", (b * n, inter), (b * n, inter), name=p + "gelu"),
            LayerSpec("matmul", (b * n, inter), (b * n, hidden),
                      (inter, hidden), name=p + "ff2"),
            LayerSpec("layernorm", (b * n, hidden), (b * n, hidden), name=p + "ln2"),
        ]
    # Biases and layernorm gains, plus the embedding tables and pooler that
    # never appear as graph layers.
    per_layer_bias = 3 * hidden + hidden + inter + hidden + 2 * (2 * hidden)
    extra = ((_BERT_VOCAB + _BERT_MAX_POS + _BERT_TYPES) * hidden  # embeddings
             + hidden * hidden + hidden                            # pooler
             + n_layers * per_layer_bias)
    return ModelGraph(name, layers, batch, seq_len, extra_param_count=extra)


def _conv(cin, cout, k, hin, win, stride, b, name):
    hout, wout = hin // stride, win // stride
    return LayerSpec("conv2d", (b, cin, hin, win), (b, cout, hout, wout),
                     (cout, cin, k, k), name=name)


def _relu(prev: LayerSpec, name: str) -> LayerSpec:
    return LayerSpec("relu", prev.output_dims, prev.output_dims, name=name)


def build_resnet20(batch: int) -> ModelGraph:
    """CIFAR-10 ResNet-20; max pooling is not used and the head pool is average."""
    b = batch
    layers = [_conv(3, 16, 3, 32, 32, 1, b, "conv1")]
    layers.append(_relu(layers[-1], "relu1"))
    cin, spatial = 16, 32
    for si, (cout, sout) in enumerate(_RESNET_CIFAR_STAGES):
        for bi in range(3):
            stride = 2 if (si > 0 and bi == 0) else 1
            pre = f"s{si}b{bi}."
            layers.append(_conv(cin, cout, 3, spatial, spatial, stride, b, pre + "conv_a"))
            layers.append(_relu(layers[-1], pre + "relu_a"))
            layers.append(_conv(cout, cout, 3, sout, sout, 1, b, pre + "conv_b"))
            if stride == 2 or cin != cout:
                layers.append(_conv(cin, cout, 1, spatial, spatial, stride, b, pre + "down"))
            layers.append(LayerSpec("relu", (b, cout, sout, sout), (b, cout, sout, sout),
                                    name=pre + "relu_b"))
            cin, spatial = cout, sout
    layers.append(LayerSpec("avgpool", (b, 64, 8, 8), (b, 64, 1, 1), name="head_pool"))
    layers.append(LayerSpec("matmul", (b, 64), (b, 10), (64, 10), name="fc"))
    extra = sum(2 * c for c, _ in _RESNET_CIFAR_STAGES) * 3 * 2 + 10  # bn gains/biases + fc bias
    return ModelGraph("resnet20", layers, b, 1, extra_param_count=extra)


_RESNET50_STAGES = (
    # (blocks, mid channels, out channels, spatial out)
    (3, 64, 256, 56),
    (4, 128, 512, 28),
    (6, 256, 1024, 14),
    (3, 512, 2048, 7),
)


def build_resnet50(batch: int) -> ModelGraph:
    """ImageNet ResNet-50 with bottleneck blocks; head pool is average."""
    b = batch
    layers = [_conv(3, 64, 7, 224, 224, 2, b, "conv1")]
    layers.append(_relu(layers[-1], "relu1"))
    # The stem max pool is replaced by average pooling like every other pool.
    layers.append(LayerSpec("avgpool", (b, 64, 112, 112), (b, 64, 56, 56), name="stem_pool"))
    cin, spatial = 64, 56
    bn_params = 2 * 64
    for si, (blocks, mid, cout, sout) in enumerate(_RESNET50_STAGES):
        for bi in range(blocks):
            # Stride-2 downsampling sits on the 3x3 conv (the v1.5 layout the
            # published op counts correspond to).
            stride = 2 if (si > 0 and bi == 0) else 1
            pre = f"s{si}b{bi}."
            layers.append(_conv(cin, mid, 1, spatial, spatial, 1, b, pre + "conv_a"))
            layers.append(_relu(layers[-1], pre + "relu_a"))
            layers.append(_conv(mid, mid, 3, spatial, spatial, stride, b, pre + "conv_b"))
            layers.append(_relu(layers[-1], pre + "relu_b"))
            layers.append(_conv(mid, cout, 1, sout, sout, 1, b, pre + "conv_c"))
            if bi == 0:
                layers.append(_conv(cin, cout, 1, spatial, spatial, stride, b, pre + "down"))
            layers.append(LayerSpec("relu", (b, cout, sout, sout), (b, cout, sout, sout),
                                    name=pre + "relu_c"))
            cin, spatial = cout, sout
            bn_params += 2 * (2 * mid + cout)
    layers.append(LayerSpec("avgpool", (b, 2048, 7, 7), (b, 2048, 1, 1), name="head_pool"))
    layers.append(LayerSpec("matmul", (b, 2048), (b, 1000), (2048, 1000), name="fc"))
    return ModelGraph("resnet50", layers, b, 1, extra_param_count=bn_params + 1000)


BUILTIN_MODELS = ("bert_tiny", "bert_base", "resnet20", "resnet50")


def build_builtin_model(name: str, seq_len: int = 128, batch: int = 1,
                        include_max: bool = True) -> ModelGraph:
    """Build one of the four reference models.

    seq_len applies to the BERT variants only.  include_max controls the
    max-before-softmax layers of the interactive-protocol graphs.
    """
    if batch < 1:
        raise ValueError("batch must be >= 1")
    if name in _BERT_CONFIGS:
        if seq_len < 1:
            raise ValueError("seq_len must be >= 1")
        return build_bert(name, seq_len, batch, include_max)
    if name == "resnet20":
        return build_resnet20(batch)
    if name == "resnet50":
        return build_resnet50(batch)
    raise ValueError(f"unknown builtin model {name!r}; choose from {BUILTIN_MODELS}")


# ---------------------------------------------------------------------------
# Graph files: one layer per line, whitespace separated key=value fields
# ---------------------------------------------------------------------------

def _fmt_dims(dims) -> str:
    return ",".join(str(d) for d in dims)


def _parse_dims(text: str, lineno: int):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ValueError(f"line {lineno}: bad dims {text!r}") from None


def dump_graph(graph: ModelGraph) -> str:
    lines = [
        f"graph name={graph.name} batch={graph.batch} seq_len={graph.seq_len} "
        f"extra_params={graph.extra_param_count}"
    ]
    for l in graph.layers:
        parts = [f"layer kind={l.kind}", f"in={_fmt_dims(l.input_dims)}",
                 f"out={_fmt_dims(l.output_dims)}"]
        if l.weight_dims:
            parts.append(f"w={_fmt_dims(l.weight_dims)}")
        if l.name:
            parts.append(f"name={l.name}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> ModelGraph:
    """Parse the dump_graph format; raises ValueError with a line number."""
    header = None
    layers = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        record, fields = tokens[0], {}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise ValueError(f"line {lineno}: expected key=value, got {tok!r}")
            k, v = tok.split("=", 1)
            fields[k] = v
        if record == "graph":
            header = (fields.get("name", "custom"), int(fields.get("batch", 1)),
                      int(fields.get("seq_len", 1)), int(fields.get("extra_params", 0)))
        elif record == "layer":
            for req in ("kind", "in", "out"):
                if req not in fields:
                    raise ValueError(f"line {lineno}: layer record missing {req}=")
            try:
                layers.append(LayerSpec(
                    fields["kind"],
                    _parse_dims(fields["in"], lineno),
                    _parse_dims(fields["out"], lineno),
                    _parse_dims(fields["w"], lineno) if "w" in fields else (),
                    name=fields.get("name", ""),
                ))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        else:
            raise ValueError(f"line {lineno}: unknown record {record!r}")
    if header is None:
        raise ValueError("graph file has no 'graph' header line")
    name, batch, seq_len, extra = header
    return ModelGraph(name, layers, batch, seq_len, extra_param_count=extra)
