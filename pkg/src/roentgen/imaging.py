"""Grayscale image handling: binary PGM codec, bilinear resize, input tensors.

PGM (P5) is the canonical on-disk format so fixtures stay bit-exact with no
codec dependencies. Datasets are directories with `pneumonic/` and
`not_pneumonic/` subfolders of .pgm files.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diagnosis import NOT_PNEUMONIC, PNEUMONIC
from .errors import FormatError
from .tensor import Tensor

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    pixels: bytes  # row-major, one byte per pixel

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image extents must be positive, got {self.width}x{self.height}")
        if len(self.pixels) != self.width * self.height:
            raise ValueError(
                f"pixel count {len(self.pixels)} does not match {self.width}x{self.height}"
            )

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width)


@dataclass(frozen=True)
class LabeledImage:
    image: GrayImage
    label: str
    id: str


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments (which run to end of line).
    n = len(data)
    while pos < n:
        ch = data[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise FormatError("unexpected end of PGM header")
    return data[start:pos], pos


def decode_pgm(data: bytes) -> GrayImage:
    """Decode a binary (P5) PGM with maxval <= 255."""
    if data[:2] != b"P5":
        raise FormatError("not a binary PGM: expected magic 'P5'")
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _read_header_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise FormatError(f"PGM {name} is not a number: {token!r}") from exc
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"PGM extents must be positive, got {width}x{height}")
    if not 0 < maxval <= 255:
        raise FormatError(f"PGM maxval must be in 1..255, got {maxval}")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise FormatError("missing whitespace before PGM raster")
    pos += 1
    needed = width * height
    raster = data[pos : pos + needed]
    if len(raster) < needed:
        raise FormatError(
            f"PGM raster too short: expected {needed} bytes, found {len(raster)}"
        )
    return GrayImage(width, height, bytes(raster))


def encode_pgm(img: GrayImage) -> bytes:
    """Companion encoder: canonical P5 bytes with maxval 255."""
    return b"P5\n%d %d\n255\n" % (img.width, img.height) + img.pixels


def resize_bilinear(img: GrayImage, out_w: int, out_h: int) -> GrayImage:
    """Bilinear resample with src = (dst + 0.5) * scale - 0.5, clamped.

    Results are rounded half away from zero back to 8 bits. Identity when
    the target equals the source size.
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target extents must be positive, got {out_w}x{out_h}")
    if out_w == img.width and out_h == img.height:
        return img
    src = img.as_array().astype(np.float64)

    def sample_axis(out_n: int, src_n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        coords = (np.arange(out_n) + 0.5) * (src_n / out_n) - 0.5
        coords = np.clip(coords, 0.0, src_n - 1.0)
        low = np.floor(coords).astype(int)
        high = np.minimum(low + 1, src_n - 1)
        return low, high, coords - low

    y0, y1, wy = sample_axis(out_h, img.height)
    x0, x1, wx = sample_axis(out_w, img.width)
    wy = wy[:, None]
    wx = wx[None, :]
    top = src[np.ix_(y0, x0)] * (1 - wx) + src[np.ix_(y0, x1)] * wx
    bottom = src[np.ix_(y1, x0)] * (1 - wx) + src[np.ix_(y1, x1)] * wx
    values = top * (1 - wy) + bottom * wy
    rounded = np.floor(values + 0.5).astype(np.uint8)  # inputs are non-negative
    return GrayImage(out_w, out_h, rounded.tobytes())


def to_input_tensor(img: GrayImage, target: tuple[int, int], channels: int) -> Tensor:
    """Resize to target (H, W), scale into [0,1], replicate across channels."""
    if channels not in (1, 3):
        raise ValueError(f"channels must be 1 or 3, got {channels}")
    target_h, target_w = target
    resized = resize_bilinear(img, target_w, target_h)
    plane = resized.as_array().astype(np.float64) / 255.0
    stacked = np.repeat(plane[:, :, None], channels, axis=2)
    return Tensor(stacked)


def load_manifest(root: str | Path, strict: bool = True) -> list[LabeledImage]:
    """Load the pneumonic/ and not_pneumonic/ folders under root, sorted by id.

    With strict=False unreadable files are skipped with a warning instead of
    aborting the listing.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {root}")
    images = []
    for label in (PNEUMONIC, NOT_PNEUMONIC):
        folder = root / label
        if not folder.is_dir():
            continue
        for path in sorted(folder.glob("*.pgm")):
            image_id = f"{label}/{path.stem}"
            try:
                img = decode_pgm(path.read_bytes())
            except (FormatError, OSError) as exc:
                if strict:
                    raise FormatError(f"{path}: {exc}") from exc
                log.warning("skipping unreadable image %s: %s", path, exc)
                continue
            images.append(LabeledImage(img, label, image_id))
    images.sort(key=lambda li: li.id)
    return images
