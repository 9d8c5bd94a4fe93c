"""Shared fixtures-in-code for the test suite: toy networks and loss closures."""

import numpy as np

from roentgen.kb import KnowledgeBase
from roentgen.network import LayerSpec, NetworkSpec, forward, init_weights
from roentgen.tensor import Tensor
from roentgen.training import bce_loss


def toy_conv_net(input_shape=(16, 16, 1)) -> NetworkSpec:
    """Small all-trainable CNN exercising every layer kind in backprop."""
    layers = (
        LayerSpec("conv2d", "c1", trainable=True, filters=4, kernel=3, stride=1, padding="same"),
        LayerSpec("relu", "c1_relu"),
        LayerSpec("maxpool2d", "p1", pool=2, stride=2),
        LayerSpec("conv2d", "c2", trainable=True, filters=8, kernel=3, stride=1, padding="valid"),
        LayerSpec("relu", "c2_relu"),
        LayerSpec("maxpool2d", "p2", pool=2, stride=2),
        LayerSpec("flatten", "flat"),
        LayerSpec("dense", "fc", trainable=True, units=8),
        LayerSpec("relu", "fc_relu"),
        LayerSpec("dense", "out", trainable=True, units=1),
        LayerSpec("sigmoid", "out_sigmoid"),
    )
    return NetworkSpec(input_shape, layers)


def head_only_net(input_shape=(6, 6, 1), units=5, filters=6) -> NetworkSpec:
    """Frozen conv front end with a trainable dense head."""
    layers = (
        LayerSpec("conv2d", "feat", trainable=False, filters=filters, kernel=3, stride=1, padding="same"),
        LayerSpec("relu", "feat_relu"),
        LayerSpec("maxpool2d", "pool", pool=2, stride=2),
        LayerSpec("flatten", "flat"),
        LayerSpec("dense", "fc1", trainable=True, units=units),
        LayerSpec("relu", "fc1_relu"),
        LayerSpec("dense", "output", trainable=True, units=1),
        LayerSpec("sigmoid", "output_sigmoid"),
    )
    return NetworkSpec(input_shape, layers)


def random_batch(net, rng, count=2):
    batch = []
    for i in range(count):
        x = Tensor(rng.uniform(0.0, 1.0, size=net.input_shape))
        batch.append((x, i % 2))
    return batch


def mean_bce_at(net, batch):
    """Closure computing mean batch BCE from a dict of raw weight arrays."""

    def loss_at(arrays):
        kb = KnowledgeBase({name: Tensor(arr) for name, arr in arrays.items()})
        total = 0.0
        for x, target in batch:
            total += bce_loss(forward(net, kb, x), float(target))
        return total / len(batch)

    return loss_at


def kb_arrays(kb: KnowledgeBase):
    return {name: np.array(t.data) for name, t in kb.entries.items()}


def make_toy_kb(net, seed=0) -> KnowledgeBase:
    return init_weights(net, seed)


def bright_dark_dataset(count=100, size=32, seed=99):
    """Synthetic plates: bright-center (label 1) vs dark-center (label 0)."""
    rng = np.random.default_rng(seed)
    data = []
    lo = size // 4
    hi = size - lo
    for i in range(count):
        label = i % 2
        img = np.clip(rng.normal(0.5, 0.05, size=(size, size, 1)), 0, 1)
        center = 0.9 if label == 1 else 0.1
        img[lo:hi, lo:hi, :] = np.clip(
            rng.normal(center, 0.05, size=(hi - lo, hi - lo, 1)), 0, 1
        )
        data.append((Tensor(img), label))
    return data
