import numpy as np
import pytest

from roentgen.kb import KnowledgeBase, save_kb
from roentgen.network import architecture_fingerprint, build_vgg16, weight_shapes
from roentgen.tensor import Tensor


def make_zero_model(path, input_size=32, channels=1, head_units=8, threshold=0.5):
    """Write a VGG model file whose weights are all zero (score exactly 0.5)."""
    net = build_vgg16((input_size, input_size, channels), head_units)
    entries = {name: Tensor.zeros(shape) for name, shape in weight_shapes(net).items()}
    kb = KnowledgeBase(
        entries,
        {
            "input_shape": [input_size, input_size, channels],
            "head_units": head_units,
            "threshold": threshold,
            "created": "2024-01-01T00:00:00+00:00",
            "fingerprint": architecture_fingerprint(net),
        },
    )
    with open(path, "wb") as fh:
        save_kb(kb, fh)
    return kb


@pytest.fixture(scope="session")
def zero_model_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "zero.rkb"
    make_zero_model(path)
    return path


def write_pgm(path, size, value, noise_seed=None):
    if noise_seed is None:
        pixels = bytes([value]) * (size * size)
    else:
        rng = np.random.default_rng(noise_seed)
        arr = np.clip(rng.normal(value, 12, size=size * size), 0, 255).astype(np.uint8)
        pixels = arr.tobytes()
    path.write_bytes(b"P5\n%d %d\n255\n" % (size, size) + pixels)


def make_dataset_dir(root, per_class=2, size=32):
    """Bright-plate pneumonic vs dark-plate non-pneumonic PGM fixtures."""
    (root / "pneumonic").mkdir(parents=True)
    (root / "not_pneumonic").mkdir(parents=True)
    for i in range(per_class):
        write_pgm(root / "pneumonic" / f"case{i}.pgm", size, 210, noise_seed=100 + i)
        write_pgm(root / "not_pneumonic" / f"case{i}.pgm", size, 40, noise_seed=200 + i)
    return root


@pytest.fixture()
def dataset_dir(tmp_path):
    return make_dataset_dir(tmp_path / "data")
