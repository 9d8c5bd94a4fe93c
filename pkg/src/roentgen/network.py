"""Network specifications, the VGG-16 builder, weight init, and inference.

A NetworkSpec is an ordered list of layer descriptions that must trace
statically: every layer's input shape is computable from its predecessor,
and the trace is validated at construction time.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, MissingWeightError
from .kb import KnowledgeBase
from .tensor import (
    ConvMode,
    Padding,
    Tensor,
    conv2d,
    dense,
    flatten,
    maxpool2d,
    relu,
    sigmoid,
)

VGG_BLOCKS = ((2, 64), (2, 128), (3, 256), (3, 512), (3, 512))


@dataclass(frozen=True)
class LayerSpec:
    """One layer: kind plus the hyperparameters that kind needs."""

    kind: str  # conv2d | maxpool2d | flatten | dense | relu | sigmoid
    name: str
    trainable: bool = False
    filters: int = 0
    kernel: int = 0
    pool: int = 0
    stride: int = 1
    padding: str = "valid"
    units: int = 0

    def weight_names(self) -> tuple[str, str] | None:
        """(weights, bias) tensor names for conv/dense layers, else None."""
        if self.kind in ("conv2d", "dense"):
            return f"{self.name}.w", f"{self.name}.b"
        return None


@dataclass(frozen=True)
class NetworkSpec:
    input_shape: tuple[int, int, int]
    layers: tuple[LayerSpec, ...]
    shapes: tuple[tuple[int, ...], ...] = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise ValueError("layer names must be unique within a network")
        object.__setattr__(self, "shapes", tuple(trace_shapes(self.input_shape, self.layers)))

    def output_shape(self) -> tuple[int, ...]:
        return self.shapes[-1]


def _conv_extent(extent: int, kernel: int, stride: int, padding: str) -> int:
    padded = extent + (kernel - 1 if padding == Padding.SAME.value else 0)
    return (padded - kernel) // stride + 1


def trace_shapes(
    input_shape: tuple[int, ...], layers: tuple[LayerSpec, ...]
) -> list[tuple[int, ...]]:
    """Output shape after each layer; raises naming the first failing layer."""
    shape = tuple(input_shape)
    shapes = []
    for layer in layers:
        try:
            shape = _layer_output_shape(layer, shape)
        except (DimensionError, ValueError) as exc:
            raise DimensionError(f"layer {layer.name!r}: {exc}") from exc
        shapes.append(shape)
    return shapes


def _layer_output_shape(layer: LayerSpec, shape: tuple[int, ...]) -> tuple[int, ...]:
    if layer.kind == "conv2d":
        if len(shape) != 3:
            raise DimensionError(f"conv2d needs rank-3 input, got {shape}")
        h = _conv_extent(shape[0], layer.kernel, layer.stride, layer.padding)
        w = _conv_extent(shape[1], layer.kernel, layer.stride, layer.padding)
        if h < 1 or w < 1:
            raise DimensionError(f"kernel {layer.kernel} does not fit input {shape}")
        return (h, w, layer.filters)
    if layer.kind == "maxpool2d":
        if len(shape) != 3:
            raise DimensionError(f"maxpool2d needs rank-3 input, got {shape}")
        h = (shape[0] - layer.pool) // layer.stride + 1
        w = (shape[1] - layer.pool) // layer.stride + 1
        if h < 1 or w < 1:
            raise DimensionError(f"pool {layer.pool} does not fit input {shape}")
        return (h, w, shape[2])
    if layer.kind == "flatten":
        n = 1
        for e in shape:
            n *= e
        return (n,)
    if layer.kind == "dense":
        if len(shape) != 1:
            raise DimensionError(f"dense needs rank-1 input, got {shape}")
        return (layer.units,)
    if layer.kind in ("relu", "sigmoid"):
        return shape
    raise ValueError(f"unknown layer kind {layer.kind!r}")


def architecture_fingerprint(net: NetworkSpec) -> str:
    """Stable hash of the network trace (shapes, kinds, hyperparameters)."""
    record = {
        "input_shape": list(net.input_shape),
        "layers": [
            {
                "kind": layer.kind,
                "name": layer.name,
                "trainable": layer.trainable,
                "filters": layer.filters,
                "kernel": layer.kernel,
                "pool": layer.pool,
                "stride": layer.stride,
                "padding": layer.padding,
                "units": layer.units,
                "out": list(shape),
            }
            for layer, shape in zip(net.layers, net.shapes)
        ],
    }
    blob = json.dumps(record, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def build_vgg16(input_shape: tuple[int, int, int], head_units: int = 256) -> NetworkSpec:
    """VGG-16 feature blocks (frozen) plus a trainable sigmoid classifier head.

    Blocks of (2, 2, 3, 3, 3) conv stages with 64/128/256/512/512 filters,
    3x3 kernels at stride 1 with same padding and relu, each closed by a
    2x2 stride-2 max pool; then flatten, dense(head_units)+relu, and a
    single sigmoid output unit.
    """
    if head_units < 1:
        raise ValueError(f"head_units must be positive, got {head_units}")
    layers: list[LayerSpec] = []
    for block, (convs, filters) in enumerate(VGG_BLOCKS, start=1):
        for stage in range(1, convs + 1):
            conv_name = f"block{block}_conv{stage}"
            layers.append(
                LayerSpec(
                    "conv2d",
                    conv_name,
                    trainable=False,
                    filters=filters,
                    kernel=3,
                    stride=1,
                    padding="same",
                )
            )
            layers.append(LayerSpec("relu", f"{conv_name}_relu"))
        layers.append(LayerSpec("maxpool2d", f"block{block}_pool", pool=2, stride=2))
    layers.append(LayerSpec("flatten", "flatten"))
    layers.append(LayerSpec("dense", "fc1", trainable=True, units=head_units))
    layers.append(LayerSpec("relu", "fc1_relu"))
    layers.append(LayerSpec("dense", "output", trainable=True, units=1))
    layers.append(LayerSpec("sigmoid", "output_sigmoid"))
    return NetworkSpec(tuple(input_shape), tuple(layers))


def weight_shapes(net: NetworkSpec) -> dict[str, tuple[int, ...]]:
    """Expected shape for every weight/bias tensor the network references."""
    shapes: dict[str, tuple[int, ...]] = {}
    in_shape = net.input_shape
    for layer, out_shape in zip(net.layers, net.shapes):
        names = layer.weight_names()
        if names:
            w_name, b_name = names
            if layer.kind == "conv2d":
                shapes[w_name] = (layer.kernel, layer.kernel, in_shape[2], layer.filters)
                shapes[b_name] = (layer.filters,)
            else:
                shapes[w_name] = (in_shape[0], layer.units)
                shapes[b_name] = (layer.units,)
        in_shape = out_shape
    return shapes


def init_weights(net: NetworkSpec, seed: int) -> KnowledgeBase:
    """Fresh weights: uniform with bound sqrt(6/fan_in) (Kaiming-style), zero biases.

    Deterministic for a given seed; draws happen in layer order from one
    PCG64 generator.
    """
    rng = np.random.default_rng(seed)
    entries: dict[str, Tensor] = {}
    shapes = weight_shapes(net)
    for layer in net.layers:
        names = layer.weight_names()
        if not names:
            continue
        w_name, b_name = names
        w_shape = shapes[w_name]
        if layer.kind == "conv2d":
            fan_in = w_shape[0] * w_shape[1] * w_shape[2]
        else:
            fan_in = w_shape[0]
        bound = np.sqrt(6.0 / fan_in)
        entries[w_name] = Tensor(rng.uniform(-bound, bound, size=w_shape))
        entries[b_name] = Tensor.zeros(shapes[b_name])
    return KnowledgeBase(entries, {"fingerprint": architecture_fingerprint(net)})


def _lookup(kb: KnowledgeBase, layer: LayerSpec, name: str, shape: tuple[int, ...]) -> Tensor:
    tensor = kb.entries.get(name)
    if tensor is None:
        raise MissingWeightError(f"layer {layer.name!r}: missing weight tensor {name!r}")
    if tensor.shape != shape:
        raise MissingWeightError(
            f"layer {layer.name!r}: tensor {name!r} has shape {tensor.shape}, expected {shape}"
        )
    return tensor


def apply_layer(layer: LayerSpec, x: Tensor, kb: KnowledgeBase, shapes: dict) -> Tensor:
    if layer.kind == "conv2d":
        w_name, b_name = layer.weight_names()
        w = _lookup(kb, layer, w_name, shapes[w_name])
        b = _lookup(kb, layer, b_name, shapes[b_name])
        return conv2d(x, w, b, ConvMode.CORRELATE, layer.padding, layer.stride)
    if layer.kind == "maxpool2d":
        return maxpool2d(x, layer.pool, layer.stride)
    if layer.kind == "flatten":
        return flatten(x)
    if layer.kind == "dense":
        w_name, b_name = layer.weight_names()
        w = _lookup(kb, layer, w_name, shapes[w_name])
        b = _lookup(kb, layer, b_name, shapes[b_name])
        return dense(x, w, b)
    if layer.kind == "relu":
        return relu(x)
    if layer.kind == "sigmoid":
        return sigmoid(x)
    raise ValueError(f"unknown layer kind {layer.kind!r}")


def forward_trace(
    net: NetworkSpec,
    kb: KnowledgeBase,
    input: Tensor,
    start: int = 0,
    stop: int | None = None,
) -> list[Tensor]:
    """Activations [input, out_start, ...] through layers[start:stop]."""
    if start == 0 and input.shape != net.input_shape:
        raise DimensionError(
            f"input shape {input.shape} does not match network input {net.input_shape}"
        )
    shapes = weight_shapes(net)
    acts = [input]
    for layer in net.layers[start:stop]:
        acts.append(apply_layer(layer, acts[-1], kb, shapes))
    return acts


def forward(net: NetworkSpec, kb: KnowledgeBase, input: Tensor) -> float:
    """Run the network; the final activation is the class score in [0, 1]."""
    out = forward_trace(net, kb, input)[-1]
    if out.data.size != 1:
        raise DimensionError(f"network output has {out.data.size} elements, expected 1")
    return float(out.data.reshape(-1)[0])
