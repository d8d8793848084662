"""Little-endian helpers shared by the MMV1, SVG1, CKPT and ATT1 codecs."""

from __future__ import annotations

import struct

import numpy as np

from fedsvg_runtime.domain.common.errors import FormatError


class ByteReader:
    """Sequential reader over an in-memory payload that fails on truncation."""

    def __init__(self, payload: bytes, path: str) -> None:
        self.payload = payload
        self.path = path
        self.offset = 0

    @property
    def remaining(self) -> int:
        return len(self.payload) - self.offset

    def take(self, n: int) -> bytes:
        if n < 0 or n > self.remaining:
            raise FormatError(self.path, f"truncated payload (need {n} bytes, have {self.remaining})")
        chunk = self.payload[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def magic(self, expected: bytes) -> None:
        found = self.take(len(expected))
        if found != expected:
            raise FormatError(self.path, f"bad magic {found!r}, expected {expected!r}")

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def version(self, supported: int) -> int:
        version = self.u32()
        if version != supported:
            raise FormatError(self.path, f"unsupported version {version}")
        return version

    def text(self) -> str:
        length = self.u32()
        return self.take(length).decode("utf-8")

    def array(self, dtype: str, count: int) -> np.ndarray:
        dt = np.dtype(dtype).newbyteorder("<")
        raw = self.take(count * dt.itemsize)
        return np.frombuffer(raw, dtype=dt).astype(dt.newbyteorder("="), copy=True)

    def expect_end(self) -> None:
        if self.remaining:
            raise FormatError(self.path, f"{self.remaining} trailing bytes")


def pack_u32(*values: int) -> bytes:
    return struct.pack(f"<{len(values)}I", *values)


def pack_text(value: str) -> bytes:
    raw = value.encode("utf-8")
    return pack_u32(len(raw)) + raw


def pack_array(values: np.ndarray, dtype: str) -> bytes:
    return np.ascontiguousarray(values, dtype=np.dtype(dtype).newbyteorder("<")).tobytes()
