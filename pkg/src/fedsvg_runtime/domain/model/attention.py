"""Captured CLS attention rows and the ATT1 columnar file.

Layout (little-endian): ``b"ATT1"``, u32 version (1), u32 n_tokens, u32
n_records, case table (u32 count, then length-prefixed UTF-8 case ids), then
the columns case index u32[n], node u32[n], layer u32[n], head u32[n] and
values f32[n * n_tokens]. Records are written in (case, node, layer, head)
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from fedsvg_runtime.domain.common.errors import FormatError
from fedsvg_runtime.domain.common.binary_io import ByteReader, pack_array, pack_text, pack_u32

MAGIC = b"ATT1"
VERSION = 1


@dataclass(frozen=True, eq=False)
class AttentionRecord:
    case_id: str
    node: int
    layer: int
    head: int
    row: np.ndarray  # (n_tokens,), entry 0 is the CLS self-attention


@dataclass(frozen=True, eq=False)
class CaseAttention:
    """All CLS rows of one case, shape (nodes, layers, heads, tokens)."""

    case_id: str
    rows: np.ndarray

    @property
    def n_tokens(self) -> int:
        return int(self.rows.shape[-1])

    def records(self) -> Iterator[AttentionRecord]:
        n_nodes, n_layers, n_heads, _ = self.rows.shape
        for node in range(n_nodes):
            for layer in range(n_layers):
                for head in range(n_heads):
                    yield AttentionRecord(self.case_id, node, layer, head, self.rows[node, layer, head])


def encode_attention(cases: Sequence[CaseAttention]) -> bytes:
    n_tokens = cases[0].n_tokens if cases else 0
    if any(c.n_tokens != n_tokens for c in cases):
        raise ValueError("all cases must share the token count")
    columns: list[list[np.ndarray]] = [[], [], [], []]
    values: list[np.ndarray] = []
    for idx, case in enumerate(cases):
        n_nodes, n_layers, n_heads, _ = case.rows.shape
        grid = np.indices((n_nodes, n_layers, n_heads)).reshape(3, -1)
        columns[0].append(np.full(grid.shape[1], idx))
        for c in range(3):
            columns[c + 1].append(grid[c])
        values.append(case.rows.reshape(-1, n_tokens))
    n_records = int(sum(v.shape[0] for v in values))
    parts = [MAGIC, pack_u32(VERSION, n_tokens, n_records, len(cases))]
    parts.extend(pack_text(case.case_id) for case in cases)
    for column in columns:
        parts.append(pack_array(np.concatenate(column) if column else np.zeros(0), "u4"))
    parts.append(pack_array(np.concatenate(values) if values else np.zeros(0), "f4"))
    return b"".join(parts)


def decode_attention(payload: bytes, path: str = "<memory>") -> list[CaseAttention]:
    reader = ByteReader(payload, path)
    reader.magic(MAGIC)
    reader.version(VERSION)
    n_tokens = reader.u32()
    n_records = reader.u32()
    case_ids = [reader.text() for _ in range(reader.u32())]
    case_idx, node, layer, head = (reader.array("u4", n_records).astype(np.int64) for _ in range(4))
    values = reader.array("f4", n_records * n_tokens).reshape(n_records, n_tokens)
    reader.expect_end()
    cases = []
    for idx, case_id in enumerate(case_ids):
        sel = case_idx == idx
        if not sel.any():
            raise FormatError(path, f"case {case_id} has no records")
        shape = (node[sel].max() + 1, layer[sel].max() + 1, head[sel].max() + 1)
        if int(sel.sum()) != int(np.prod(shape)):
            raise FormatError(path, f"case {case_id} does not cover every node, layer and head")
        rows = np.zeros(shape + (n_tokens,), dtype=np.float32)
        rows[node[sel], layer[sel], head[sel]] = values[sel]
        cases.append(CaseAttention(case_id, rows))
    return cases


def write_attention(cases: Sequence[CaseAttention], path: Path) -> None:
    Path(path).write_bytes(encode_attention(cases))


def read_attention(path: Path) -> list[CaseAttention]:
    return decode_attention(Path(path).read_bytes(), str(path))
