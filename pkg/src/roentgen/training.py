"""Classifier-head training: binary cross-entropy, exact backprop, plain SGD.

Only tensors belonging to trainable layers receive gradients or updates;
frozen tensors are shared, never copied, and therefore bitwise unchanged.
The frozen prefix of the network is evaluated once per (sample, flip) pair
and cached, which is exact: its output cannot change while its weights are
frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import TrainingError
from .kb import KnowledgeBase
from .network import NetworkSpec, forward_trace, weight_shapes
from .tensor import Padding, Tensor, _pad_amounts

EPS = 1e-12


def bce_loss(score: float, target: float) -> float:
    """Binary cross-entropy with the score clamped to [eps, 1-eps]."""
    s = min(max(score, EPS), 1.0 - EPS)
    return -(target * math.log(s) + (1.0 - target) * math.log(1.0 - s))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    epochs: int
    batch_size: int
    seed: int
    augment_hflip: bool = False
    threshold: float = 0.5

    def __post_init__(self):
        # 0 is allowed (a zero step leaves weights untouched); negative is not.
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie strictly in (0,1), got {self.threshold}")


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    loss: float
    accuracy: float
    val_accuracy: float | None = None

    def to_dict(self) -> dict:
        out = {"epoch": self.epoch, "loss": self.loss, "accuracy": self.accuracy}
        if self.val_accuracy is not None:
            out["val_accuracy"] = self.val_accuracy
        return out


def trainable_tensor_names(net: NetworkSpec) -> list[str]:
    names = []
    for layer in net.layers:
        pair = layer.weight_names()
        if pair and layer.trainable:
            names.extend(pair)
    return names


def _first_trainable_index(net: NetworkSpec) -> int | None:
    for i, layer in enumerate(net.layers):
        if layer.trainable and layer.weight_names():
            return i
    return None


def _conv_backward(layer, x, w, delta, need_input):
    kh = kw = layer.kernel
    stride = layer.stride
    xd = x.data
    if layer.padding == Padding.SAME.value:
        pads = (_pad_amounts(kh), _pad_amounts(kw), (0, 0))
        xp = np.pad(xd, pads)
    else:
        pads = ((0, 0), (0, 0), (0, 0))
        xp = xd
    win = sliding_window_view(xp, (kh, kw), axis=(0, 1))[::stride, ::stride]
    # (C,kh,kw,F) -> (kh,kw,C,F)
    gw = np.tensordot(win, delta, axes=([0, 1], [0, 1])).transpose(1, 2, 0, 3)
    gb = delta.sum(axis=(0, 1))
    dx = None
    if need_input:
        out_h, out_w = delta.shape[0], delta.shape[1]
        dxp = np.zeros_like(xp)
        for i in range(kh):
            for j in range(kw):
                dxp[
                    i : i + (out_h - 1) * stride + 1 : stride,
                    j : j + (out_w - 1) * stride + 1 : stride,
                    :,
                ] += np.tensordot(delta, w.data[i, j], axes=([2], [1]))
        dx = dxp[
            pads[0][0] : pads[0][0] + xd.shape[0],
            pads[1][0] : pads[1][0] + xd.shape[1],
            :,
        ]
    return gw, gb, dx


def _maxpool_backward(layer, x, delta):
    pool, stride = layer.pool, layer.stride
    xd = x.data
    win = sliding_window_view(xd, (pool, pool), axis=(0, 1))[::stride, ::stride]
    out_h, out_w, channels = win.shape[0], win.shape[1], win.shape[2]
    flat_idx = win.reshape(out_h, out_w, channels, pool * pool).argmax(axis=3)
    iy, ix = np.divmod(flat_idx, pool)
    oy, ox, oc = np.indices((out_h, out_w, channels))
    dx = np.zeros_like(xd)
    np.add.at(dx, (oy * stride + iy, ox * stride + ix, oc), delta)
    return dx


def _backprop(
    net: NetworkSpec,
    kb: KnowledgeBase,
    acts: list[Tensor],
    target: float,
    start: int,
    stop_at: int,
    sink: dict[str, np.ndarray],
) -> tuple[float, float]:
    """Backward pass from the final sigmoid down to layer index stop_at.

    acts are the activations of layers[start:]; gradients of trainable
    weights are accumulated into sink. Returns (loss, score). The final
    sigmoid is fused with the loss, so the starting delta is score-target.
    """
    layers = net.layers
    if layers[-1].kind != "sigmoid":
        raise ValueError("training requires a network ending in a sigmoid layer")
    score = float(acts[-1].data.reshape(-1)[0])
    loss = bce_loss(score, target)
    delta = (acts[-1].data - target).reshape(acts[-1].shape)
    for index in range(len(layers) - 2, stop_at - 1, -1):
        layer = layers[index]
        x = acts[index - start]
        out = acts[index - start + 1]
        need_input = index > stop_at
        if layer.kind == "dense":
            if layer.trainable:
                w_name, b_name = layer.weight_names()
                sink[w_name] += np.outer(x.data, delta)
                sink[b_name] += delta
            if need_input:
                w_name, _ = layer.weight_names()
                delta = kb.entries[w_name].data @ delta
        elif layer.kind == "conv2d":
            w_name, b_name = layer.weight_names()
            gw, gb, dx = _conv_backward(layer, x, kb.entries[w_name], delta, need_input)
            if layer.trainable:
                sink[w_name] += gw
                sink[b_name] += gb
            delta = dx
        elif layer.kind == "maxpool2d":
            if need_input:
                delta = _maxpool_backward(layer, x, delta)
        elif layer.kind == "flatten":
            if need_input:
                delta = delta.reshape(x.shape)
        elif layer.kind == "relu":
            if need_input:
                delta = delta * (x.data > 0)
        elif layer.kind == "sigmoid":
            if need_input:
                delta = delta * out.data * (1.0 - out.data)
        else:
            raise ValueError(f"unknown layer kind {layer.kind!r}")
    return loss, score


def gradients(net: NetworkSpec, kb: KnowledgeBase, batch) -> dict[str, Tensor]:
    """Exact gradients of mean batch BCE for every trainable tensor."""
    if not batch:
        raise ValueError("gradient batch must be non-empty")
    stop_at = _first_trainable_index(net)
    if stop_at is None:
        return {}
    shapes = weight_shapes(net)
    sink = {name: np.zeros(shapes[name]) for name in trainable_tensor_names(net)}
    for x, target in batch:
        acts = forward_trace(net, kb, x)
        _backprop(net, kb, acts, float(target), 0, stop_at, sink)
    return {name: Tensor(g / len(batch)) for name, g in sink.items()}


def _flip_h(t: Tensor) -> Tensor:
    return Tensor._wrap(t.data[:, ::-1, :].copy())


def train_head(
    net: NetworkSpec,
    kb: KnowledgeBase,
    dataset: list[tuple[Tensor, int]],
    cfg: TrainConfig,
) -> tuple[KnowledgeBase, list[EpochMetrics]]:
    """Mini-batch SGD on mean BCE over the trainable tensors only.

    Deterministic for a given seed: shuffling and augmentation flips come
    from one seeded PCG64 generator. Returns the updated knowledge base
    and per-epoch metrics.
    """
    if not dataset:
        raise ValueError("training dataset must be non-empty")
    for _, label in dataset:
        if label not in (0, 1):
            raise ValueError(f"labels must be 0 or 1, got {label!r}")
    stop_at = _first_trainable_index(net)
    if stop_at is None:
        raise ValueError("network has no trainable tensors")
    if net.layers[-1].kind != "sigmoid":
        raise ValueError("training requires a network ending in a sigmoid layer")

    shapes = weight_shapes(net)
    trainable = trainable_tensor_names(net)
    kb = kb.copy()
    kb.metadata["threshold"] = cfg.threshold
    rng = np.random.default_rng(cfg.seed)
    n = len(dataset)

    boundary_cache: dict[tuple[int, bool], Tensor] = {}

    def boundary(i: int, flipped: bool) -> Tensor:
        key = (i, flipped)
        if key not in boundary_cache:
            x = dataset[i][0]
            if flipped:
                x = _flip_h(x)
            boundary_cache[key] = forward_trace(net, kb, x, stop=stop_at)[-1]
        return boundary_cache[key]

    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        loss_total = 0.0
        correct = 0
        for batch_index, lo in enumerate(range(0, n, cfg.batch_size)):
            batch = order[lo : lo + cfg.batch_size]
            sink = {name: np.zeros(shapes[name]) for name in trainable}
            try:
                for i in batch:
                    flipped = bool(cfg.augment_hflip) and bool(rng.random() < 0.5)
                    acts = forward_trace(net, kb, boundary(int(i), flipped), start=stop_at)
                    loss, score = _backprop(
                        net, kb, acts, float(dataset[int(i)][1]), stop_at, stop_at, sink
                    )
                    if not math.isfinite(loss):
                        raise TrainingError(
                            f"non-finite loss at epoch {epoch}, batch {batch_index}",
                            epoch,
                            batch_index,
                        )
                    loss_total += loss
                    predicted = 1 if score >= cfg.threshold else 0
                    correct += int(predicted == dataset[int(i)][1])
            except FloatingPointError as exc:
                raise TrainingError(
                    f"non-finite activation at epoch {epoch}, batch {batch_index}: {exc}",
                    epoch,
                    batch_index,
                ) from exc
            scale = cfg.learning_rate / len(batch)
            for name in trainable:
                kb.entries[name] = Tensor(kb.entries[name].data - scale * sink[name])
        history.append(EpochMetrics(epoch, loss_total / n, correct / n))
    return kb, history
