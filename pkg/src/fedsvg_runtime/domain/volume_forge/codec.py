"""MMV1 volume file format.

Layout (little-endian): ``b"MMV1"``, u32 version (1), u32 dx, dy, dz, u32
case-id length and UTF-8 bytes, 4 channels of f32 (T1, T1ce, T2, FLAIR, each
x-fastest), then the mask as u8 in x-fastest order.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from fedsvg_runtime.domain.common.binary_io import ByteReader, pack_array, pack_text, pack_u32
from fedsvg_runtime.domain.common.ids import CaseId
from fedsvg_runtime.domain.volume_forge.config import MODALITIES
from fedsvg_runtime.domain.volume_forge.model import Volume

MAGIC = b"MMV1"
VERSION = 1


def header_size(case_id: str) -> int:
    return len(MAGIC) + 4 + 12 + 4 + len(case_id.encode("utf-8"))


def encode_volume(v: Volume) -> bytes:
    dx, dy, dz = v.dims
    parts = [MAGIC, pack_u32(VERSION, dx, dy, dz), pack_text(v.case_id)]
    for c in range(len(MODALITIES)):
        parts.append(pack_array(v.channels[c].ravel(order="F"), "f4"))
    parts.append(pack_array(v.mask.ravel(order="F"), "u1"))
    return b"".join(parts)


def decode_volume(payload: bytes, path: str = "<memory>") -> Volume:
    reader = ByteReader(payload, path)
    reader.magic(MAGIC)
    reader.version(VERSION)
    dims = (reader.u32(), reader.u32(), reader.u32())
    case_id = reader.text()
    n = dims[0] * dims[1] * dims[2]
    channels = np.stack(
        [reader.array("f4", n).reshape(dims, order="F") for _ in MODALITIES]
    ).astype(np.float32)
    mask = reader.array("u1", n).reshape(dims, order="F")
    reader.expect_end()
    return Volume(case_id=CaseId(case_id), channels=channels, mask=mask)


def write_volume(v: Volume, path: Path) -> None:
    Path(path).write_bytes(encode_volume(v))


def read_volume(path: Path) -> Volume:
    return decode_volume(Path(path).read_bytes(), str(path))
