"""CKPT parameter files.

Layout (little-endian): ``b"CKPT"``, u32 version (1), u32 entry count, then per
entry u32 name length, UTF-8 name, u32 ndim and ndim u32 dims; finally every
tensor's f32 data in entry order, row-major.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from fedsvg_runtime.domain.common.binary_io import ByteReader, pack_array, pack_text, pack_u32
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore

MAGIC = b"CKPT"
VERSION = 1


def encode_checkpoint(store: ParamStore) -> bytes:
    parts = [MAGIC, pack_u32(VERSION, len(store))]
    for name, value in store.items():
        parts.append(pack_text(name))
        parts.append(pack_u32(value.ndim, *value.shape))
    for value in store.values():
        parts.append(pack_array(value.ravel(), "f4"))
    return b"".join(parts)


def decode_checkpoint(payload: bytes, path: str = "<memory>") -> ParamStore:
    reader = ByteReader(payload, path)
    reader.magic(MAGIC)
    reader.version(VERSION)
    count = reader.u32()
    layout: list[tuple[str, tuple[int, ...]]] = []
    for _ in range(count):
        name = reader.text()
        ndim = reader.u32()
        layout.append((name, tuple(reader.u32() for _ in range(ndim))))
    values = {name: reader.array("f4", int(np.prod(shape, dtype=np.int64))).reshape(shape) for name, shape in layout}
    reader.expect_end()
    return ParamStore(values, dtype=np.float32)


def write_checkpoint(store: ParamStore, path: Path) -> None:
    Path(path).write_bytes(encode_checkpoint(store))


def read_checkpoint(path: Path) -> ParamStore:
    return decode_checkpoint(Path(path).read_bytes(), str(path))
