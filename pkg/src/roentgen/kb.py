"""Knowledge base: named weight tensors plus metadata, serialized as RKB.

RKB is a minimal self-describing binary layout:

    magic "RKB1"                      4 bytes
    format version                    u32 LE
    metadata JSON length              u32 LE
    metadata                          UTF-8 JSON object
    tensor count                      u32 LE
    per tensor, in lexicographic name order:
        name length                   u16 LE
        name                          UTF-8 bytes
        rank                          u8
        extents                       rank x u32 LE
        data                          product(extents) x f32 LE

Runtime math is float64; files store float32, so a round trip quantizes
weights to 32-bit precision.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from typing import BinaryIO

import numpy as np

from .errors import CorruptionError, FormatError, VersionError
from .tensor import Tensor

MAGIC = b"RKB1"
FORMAT_VERSION = 1


@dataclass
class KnowledgeBase:
    """Named weight tensors plus free-form JSON metadata."""

    entries: dict[str, Tensor] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in self.entries:
            if not name:
                raise ValueError("tensor names must be non-empty")

    def copy(self) -> "KnowledgeBase":
        return KnowledgeBase(dict(self.entries), dict(self.metadata))

    def fingerprint(self) -> str:
        """Architecture fingerprint from metadata, else a content hash."""
        fp = self.metadata.get("fingerprint")
        if fp:
            return fp
        digest = hashlib.sha256()
        for name, tensor in sorted(self.entries.items()):
            digest.update(name.encode())
            digest.update(repr(tensor.shape).encode())
            digest.update(tensor.data.astype("<f4").tobytes())
        return digest.hexdigest()


def _encode_metadata(metadata: dict) -> bytes:
    return json.dumps(metadata, sort_keys=True, separators=(",", ":")).encode()


def save_kb(kb: KnowledgeBase, sink: BinaryIO) -> int:
    """Write the RKB encoding of kb; returns the byte count written."""
    meta = _encode_metadata(kb.metadata)
    chunks = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
    chunks.append(struct.pack("<I", len(meta)))
    chunks.append(meta)
    chunks.append(struct.pack("<I", len(kb.entries)))
    for name in sorted(kb.entries, key=lambda n: n.encode()):
        tensor = kb.entries[name]
        encoded = name.encode()
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("B", tensor.rank))
        chunks.append(struct.pack(f"<{tensor.rank}I", *tensor.shape))
        chunks.append(tensor.data.astype("<f4").tobytes())
    blob = b"".join(chunks)
    sink.write(blob)
    return len(blob)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptionError(f"truncated file while reading {what}")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def u16(self, what: str) -> int:
        return struct.unpack("<H", self.take(2, what))[0]

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def remaining(self) -> int:
        return len(self.data) - self.pos


def load_kb(source: BinaryIO) -> KnowledgeBase:
    """Parse an RKB stream; rejects bad magic, future versions, and trailing bytes."""
    reader = _Reader(source.read())
    if reader.remaining() < 4 or reader.take(4, "magic") != MAGIC:
        raise FormatError("not an RKB file: bad magic")
    version = reader.u32("format version")
    if version > FORMAT_VERSION:
        raise VersionError(f"unsupported RKB version {version} (supported: {FORMAT_VERSION})")
    meta_len = reader.u32("metadata length")
    meta_raw = reader.take(meta_len, "metadata block")
    try:
        metadata = json.loads(meta_raw.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"metadata block is not valid JSON: {exc}") from exc
    if not isinstance(metadata, dict):
        raise FormatError("metadata block must be a JSON object")

    count = reader.u32("tensor count")
    entries: dict[str, Tensor] = {}
    for _ in range(count):
        name_len = reader.u16("tensor name length")
        try:
            name = reader.take(name_len, "tensor name").decode()
        except UnicodeDecodeError as exc:
            raise FormatError(f"tensor name is not valid UTF-8: {exc}") from exc
        if not name:
            raise FormatError("tensor name is empty")
        if name in entries:
            raise FormatError(f"duplicate tensor name {name!r}")
        rank = reader.u8(f"rank of {name!r}")
        if not 1 <= rank <= 4:
            raise CorruptionError(f"tensor {name!r} declares invalid rank {rank}")
        extents = struct.unpack(f"<{rank}I", reader.take(4 * rank, f"extents of {name!r}"))
        if any(e == 0 for e in extents):
            raise CorruptionError(f"tensor {name!r} declares a zero extent")
        total = 1
        for e in extents:
            total *= e
        # Bound-check before allocating anything of the declared size.
        if total * 4 > reader.remaining():
            raise CorruptionError(
                f"truncated file: tensor {name!r} declares {total} elements "
                f"but only {reader.remaining()} bytes remain"
            )
        raw = reader.take(total * 4, f"data of {name!r}")
        values = np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(extents)
        entries[name] = Tensor(values)
    if reader.remaining() != 0:
        raise FormatError(f"{reader.remaining()} trailing bytes after last tensor")
    return KnowledgeBase(entries, metadata)
