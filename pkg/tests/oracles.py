"""Independent brute-force reference implementations used to check the engine.

Everything here is written with plain scalar loops, deliberately sharing no
code with the package under test.
"""

import math

import numpy as np


def flip180_ref(k):
    kh = len(k)
    kw = len(k[0])
    return [[k[kh - 1 - i][kw - 1 - j] for j in range(kw)] for i in range(kh)]


def conv_full_overlap_ref(a, b):
    """Eq-style full-overlap flipped product: scalar from two m x n matrices."""
    m = len(a)
    n = len(a[0])
    total = 0.0
    for i in range(m):
        for j in range(n):
            total += a[m - 1 - i][n - 1 - j] * b[i][j]
    return total


def pad_same_ref(x, kh, kw):
    """Zero-pad an H x W x C nested list with k-1 total zeros per axis (extra after)."""
    h, w, c = len(x), len(x[0]), len(x[0][0])
    top = (kh - 1) // 2
    bottom = kh - 1 - top
    left = (kw - 1) // 2
    right = kw - 1 - left
    out = [
        [[0.0] * c for _ in range(left + w + right)] for _ in range(top + h + bottom)
    ]
    for i in range(h):
        for j in range(w):
            for ch in range(c):
                out[top + i][left + j][ch] = x[i][j][ch]
    return out


def conv2d_ref(x, kernels, bias, mode="correlate", padding="valid", stride=1):
    """Sliding-window convolution with scalar loops.

    x: H x W x C nested lists; kernels: kh x kw x C x F; bias: length F.
    Returns H' x W' x F nested lists.
    """
    kh = len(kernels)
    kw = len(kernels[0])
    c = len(kernels[0][0])
    f = len(kernels[0][0][0])
    if mode == "convolve":
        kernels = [
            [
                [
                    [kernels[kh - 1 - i][kw - 1 - j][ch][fi] for fi in range(f)]
                    for ch in range(c)
                ]
                for j in range(kw)
            ]
            for i in range(kh)
        ]
    if padding == "same":
        x = pad_same_ref(x, kh, kw)
    hp, wp = len(x), len(x[0])
    out_h = (hp - kh) // stride + 1
    out_w = (wp - kw) // stride + 1
    out = [[[0.0] * f for _ in range(out_w)] for _ in range(out_h)]
    for oy in range(out_h):
        for ox in range(out_w):
            for fi in range(f):
                acc = bias[fi]
                for i in range(kh):
                    for j in range(kw):
                        for ch in range(c):
                            acc += (
                                x[oy * stride + i][ox * stride + j][ch]
                                * kernels[i][j][ch][fi]
                            )
                out[oy][ox][fi] = acc
    return out


def maxpool2d_ref(x, pool, stride):
    h, w, c = len(x), len(x[0]), len(x[0][0])
    out_h = (h - pool) // stride + 1
    out_w = (w - pool) // stride + 1
    out = [[[0.0] * c for _ in range(out_w)] for _ in range(out_h)]
    for oy in range(out_h):
        for ox in range(out_w):
            for ch in range(c):
                best = -math.inf
                for i in range(pool):
                    for j in range(pool):
                        best = max(best, x[oy * stride + i][ox * stride + j][ch])
                out[oy][ox][ch] = best
    return out


def bilinear_ref(pixels, out_w, out_h):
    """Reference bilinear resize of a row-major 8-bit image (list of rows).

    Sample mapping src = (dst + 0.5) * scale - 0.5, coordinates clamped,
    result rounded half away from zero.
    """
    src_h = len(pixels)
    src_w = len(pixels[0])
    sy = src_h / out_h
    sx = src_w / out_w
    out = []
    for dy in range(out_h):
        fy = min(max((dy + 0.5) * sy - 0.5, 0.0), src_h - 1.0)
        y0 = int(math.floor(fy))
        y1 = min(y0 + 1, src_h - 1)
        wy = fy - y0
        row = []
        for dx in range(out_w):
            fx = min(max((dx + 0.5) * sx - 0.5, 0.0), src_w - 1.0)
            x0 = int(math.floor(fx))
            x1 = min(x0 + 1, src_w - 1)
            wx = fx - x0
            top = pixels[y0][x0] * (1 - wx) + pixels[y0][x1] * wx
            bottom = pixels[y1][x0] * (1 - wx) + pixels[y1][x1] * wx
            value = top * (1 - wy) + bottom * wy
            row.append(int(math.floor(value + 0.5)))
        out.append(row)
    return out


def central_difference_grads(loss_at, kb_arrays, names, h=1e-5):
    """Numeric gradients of loss_at(arrays) for each named array, by central differences."""
    grads = {}
    for name in names:
        base = kb_arrays[name]
        grad = np.zeros_like(base)
        flat = grad.reshape(-1)
        for idx in range(base.size):
            plus = {k: v.copy() for k, v in kb_arrays.items()}
            minus = {k: v.copy() for k, v in kb_arrays.items()}
            plus[name].reshape(-1)[idx] += h
            minus[name].reshape(-1)[idx] -= h
            flat[idx] = (loss_at(plus) - loss_at(minus)) / (2 * h)
        grads[name] = grad
    return grads
