"""Dense tensors and the numeric kernels every network layer is built from.

All arithmetic runs in 64-bit floats. Convolution comes in two flavours:
``conv_full_overlap`` is the full-overlap flipped product of two equally
shaped matrices (a single scalar), and ``conv2d`` generalizes it to
sliding-window feature maps over multi-channel inputs.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionError

__all__ = [
    "Tensor",
    "ConvMode",
    "Padding",
    "conv_full_overlap",
    "conv2d",
    "maxpool2d",
    "dense",
    "relu",
    "sigmoid",
    "flatten",
    "flip180",
]


class ConvMode(str, Enum):
    """Window product convention: ``convolve`` flips the kernel 180 degrees."""

    CORRELATE = "correlate"
    CONVOLVE = "convolve"


class Padding(str, Enum):
    """``same`` zero-pads so spatial extent is preserved at stride 1."""

    VALID = "valid"
    SAME = "same"


class Tensor:
    """Dense rank-1..4 array of float64, immutable once constructed."""

    __slots__ = ("data",)

    def __init__(self, values, shape: tuple[int, ...] | None = None):
        arr = np.array(values, dtype=np.float64, order="C")
        if shape is not None:
            arr = arr.reshape(shape)
        _check_shape(arr.shape)
        arr.flags.writeable = False
        self.data = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Tensor":
        # Internal fast path for freshly allocated arrays: no copy.
        if __debug__ and not np.isfinite(arr).all():
            raise FloatingPointError("non-finite values in tensor result")
        _check_shape(arr.shape)
        out = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(out, "data", arr)
        return out

    @classmethod
    def zeros(cls, shape: tuple[int, ...]) -> "Tensor":
        return cls._wrap(np.zeros(shape, dtype=np.float64))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def rank(self) -> int:
        return self.data.ndim

    def tolist(self):
        return self.data.tolist()

    def __eq__(self, other) -> bool:
        return isinstance(other, Tensor) and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape})"


def _check_shape(shape: tuple[int, ...]) -> None:
    if not 1 <= len(shape) <= 4:
        raise DimensionError(f"tensor rank must be 1..4, got shape {shape}")
    if any(extent <= 0 for extent in shape):
        raise DimensionError(f"tensor extents must be positive, got shape {shape}")


def flip180(t: Tensor) -> Tensor:
    """Reverse a rank-2 tensor along both axes."""
    if t.rank != 2:
        raise DimensionError(f"flip180 expects rank 2, got shape {t.shape}")
    return Tensor._wrap(t.data[::-1, ::-1].copy())


def conv_full_overlap(a: Tensor, b: Tensor) -> float:
    """Full-overlap flipped product of two equally shaped rank-2 tensors.

    Computes sum_{i=0}^{m-1} sum_{j=0}^{n-1} a[m-1-i, n-1-j] * b[i, j],
    i.e. the single-scalar convolution of the two matrices.
    """
    if a.rank != 2 or b.rank != 2:
        raise DimensionError(
            f"conv_full_overlap expects two rank-2 tensors, got {a.shape} and {b.shape}"
        )
    if a.shape != b.shape:
        raise DimensionError(
            f"conv_full_overlap requires identical shapes, got {a.shape} vs {b.shape}"
        )
    return float(np.sum(a.data[::-1, ::-1] * b.data))


def _pad_amounts(k: int) -> tuple[int, int]:
    # 'same' distributes k-1 zeros, extra on the trailing edge.
    before = (k - 1) // 2
    return before, (k - 1) - before


def conv2d(
    input: Tensor,
    kernels: Tensor,
    bias: Tensor,
    mode: ConvMode | str = ConvMode.CORRELATE,
    padding: Padding | str = Padding.VALID,
    stride: int = 1,
) -> Tensor:
    """Multi-channel sliding-window convolution producing an HxWxF map.

    input: rank-3 H x W x C; kernels: rank-4 kh x kw x C x F; bias: rank-1 F.
    Output element (y, x, f) is the window product at stride offsets, summed
    over channels, plus bias[f]; the kernel is flipped when mode=convolve.
    """
    mode = ConvMode(mode)
    padding = Padding(padding)
    if stride < 1:
        raise ValueError(f"stride must be a positive integer, got {stride}")
    if input.rank != 3:
        raise DimensionError(f"conv2d input must be rank 3 (HxWxC), got {input.shape}")
    if kernels.rank != 4:
        raise DimensionError(
            f"conv2d kernels must be rank 4 (khxkwxCxF), got {kernels.shape}"
        )
    h, w, c = input.shape
    kh, kw, kc, f = kernels.shape
    if kc != c:
        raise DimensionError(
            f"channel mismatch: input has {c} channels, kernels expect {kc}"
        )
    if bias.shape != (f,):
        raise DimensionError(f"bias must have shape ({f},), got {bias.shape}")

    x = input.data
    if padding is Padding.SAME:
        x = np.pad(x, (_pad_amounts(kh), _pad_amounts(kw), (0, 0)))
    hp, wp = x.shape[0], x.shape[1]
    if kh > hp or kw > wp:
        raise DimensionError(
            f"kernel {kh}x{kw} larger than padded input {hp}x{wp}"
        )

    k = kernels.data
    if mode is ConvMode.CONVOLVE:
        k = k[::-1, ::-1, :, :]

    # windows: (H', W', C, kh, kw); contract (C, kh, kw) against the kernel.
    win = sliding_window_view(x, (kh, kw), axis=(0, 1))[::stride, ::stride]
    out = np.tensordot(win, k, axes=([2, 3, 4], [2, 0, 1])) + bias.data
    return Tensor._wrap(out)


def maxpool2d(input: Tensor, pool: int, stride: int) -> Tensor:
    """Per-channel window maximum; windows that overrun the edge are dropped."""
    if pool < 1 or stride < 1:
        raise ValueError(f"pool and stride must be positive, got {pool}, {stride}")
    if input.rank != 3:
        raise DimensionError(f"maxpool2d input must be rank 3, got {input.shape}")
    h, w, _ = input.shape
    if pool > h or pool > w:
        raise DimensionError(f"pool {pool} exceeds input extent {h}x{w}")
    win = sliding_window_view(input.data, (pool, pool), axis=(0, 1))[::stride, ::stride]
    return Tensor._wrap(win.max(axis=(3, 4)))


def dense(input: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Fully-connected product: out_j = sum_i input_i * weights_ij + bias_j."""
    if input.rank != 1 or weights.rank != 2:
        raise DimensionError(
            f"dense expects rank-1 input and rank-2 weights, got {input.shape}, {weights.shape}"
        )
    n, k = weights.shape
    if input.shape != (n,):
        raise DimensionError(
            f"dense input shape {input.shape} does not match weights {weights.shape}"
        )
    if bias.shape != (k,):
        raise DimensionError(f"dense bias must have shape ({k},), got {bias.shape}")
    return Tensor._wrap(input.data @ weights.data + bias.data)


def relu(t: Tensor) -> Tensor:
    return Tensor._wrap(np.maximum(t.data, 0.0))


def sigmoid(t: Tensor) -> Tensor:
    return Tensor._wrap(_sigmoid(t.data))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Split by sign so exp never overflows.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def flatten(t: Tensor) -> Tensor:
    """Row-major linearization to rank 1."""
    return Tensor._wrap(t.data.reshape(-1).copy())
