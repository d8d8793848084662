"""SVG1 supervoxel graph file format.

Layout (little-endian): ``b"SVG1"``, u32 version (1), u32 n_nodes, n_edges,
n_patch_rows, n_features, dx, dy, dz, u32 case-id length and UTF-8 bytes, then
centroids f64 (n×3), edges u32 (e×2), patches f32 (n×rows×features), labels u8
(n), tumor_fraction f64 (n), voxel offsets u32 (n+1) and voxel indices u32
(offsets[n]).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from fedsvg_runtime.domain.common.errors import FormatError
from fedsvg_runtime.domain.common.binary_io import ByteReader, pack_array, pack_text, pack_u32
from fedsvg_runtime.domain.common.ids import CaseId
from fedsvg_runtime.domain.supervoxel_graph.model import SupervoxelGraph

MAGIC = b"SVG1"
VERSION = 1


def encoded_size(n_nodes: int, n_edges: int, rows: int, features: int, n_voxels: int, case_id: str) -> int:
    header = len(MAGIC) + 4 * 9 + len(case_id.encode("utf-8"))
    body = (
        8 * 3 * n_nodes
        + 4 * 2 * n_edges
        + 4 * n_nodes * rows * features
        + n_nodes
        + 8 * n_nodes
        + 4 * (n_nodes + 1)
        + 4 * n_voxels
    )
    return header + body


def encode_graph(g: SupervoxelGraph) -> bytes:
    _, rows, features = g.patches.shape
    return b"".join(
        [
            MAGIC,
            pack_u32(VERSION, g.n_nodes, g.n_edges, rows, features, *g.dims),
            pack_text(g.case_id),
            pack_array(g.centroids, "f8"),
            pack_array(g.edges, "u4"),
            pack_array(g.patches, "f4"),
            pack_array(g.labels, "u1"),
            pack_array(g.tumor_fraction, "f8"),
            pack_array(g.voxel_offsets, "u4"),
            pack_array(g.voxel_index, "u4"),
        ]
    )


def decode_graph(payload: bytes, path: str = "<memory>") -> SupervoxelGraph:
    reader = ByteReader(payload, path)
    reader.magic(MAGIC)
    reader.version(VERSION)
    n, e, rows, features, dx, dy, dz = (reader.u32() for _ in range(7))
    case_id = reader.text()
    fixed = encoded_size(n, e, rows, features, 0, case_id) - (len(case_id.encode("utf-8")) + len(MAGIC) + 36)
    if fixed > reader.remaining:
        raise FormatError(path, f"length fields need {fixed} bytes, payload has {reader.remaining}")
    centroids = reader.array("f8", n * 3).reshape(n, 3)
    edges = reader.array("u4", e * 2).reshape(e, 2).astype(np.int64)
    patches = reader.array("f4", n * rows * features).reshape(n, rows, features)
    labels = reader.array("u1", n)
    tumor_fraction = reader.array("f8", n)
    offsets = reader.array("u4", n + 1).astype(np.int64)
    if np.any(np.diff(offsets) < 0) or offsets[0] != 0:
        raise FormatError(path, "voxel offsets are not monotone")
    index = reader.array("u4", int(offsets[-1])).astype(np.int64)
    reader.expect_end()
    if np.any(edges >= max(n, 1)):
        raise FormatError(path, "edge references a missing node")
    return SupervoxelGraph(
        case_id=CaseId(case_id),
        dims=(dx, dy, dz),
        centroids=centroids,
        edges=edges,
        patches=patches,
        labels=labels,
        tumor_fraction=tumor_fraction,
        voxel_offsets=offsets,
        voxel_index=index,
    )


def write_graph(g: SupervoxelGraph, path: Path) -> None:
    Path(path).write_bytes(encode_graph(g))


def read_graph(path: Path) -> SupervoxelGraph:
    return decode_graph(Path(path).read_bytes(), str(path))
