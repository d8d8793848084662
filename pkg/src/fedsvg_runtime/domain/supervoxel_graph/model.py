from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fedsvg_runtime.domain.common.ids import CaseId

PRUNED = np.uint32(0xFFFFFFFF)


@dataclass(frozen=True, eq=False)
class Labeling:
    """Supervoxel id per voxel; ``PRUNED`` marks voxels outside any supervoxel."""

    label_of: np.ndarray  # uint32, shape dims
    n_labels: int

    @property
    def dims(self) -> tuple[int, int, int]:
        dx, dy, dz = self.label_of.shape
        return (int(dx), int(dy), int(dz))

    @property
    def n_voxels(self) -> int:
        return int(self.label_of.size)

    def flat(self) -> np.ndarray:
        """Labels in x-fastest voxel order."""
        return self.label_of.ravel(order="F")

    def sizes(self) -> np.ndarray:
        flat = self.flat()
        return np.bincount(flat[flat != PRUNED].astype(np.int64), minlength=self.n_labels)

    def members(self, label: int) -> np.ndarray:
        """Flat voxel indices of ``label`` in ascending order."""
        return np.flatnonzero(self.flat() == label)


@dataclass(frozen=True, eq=False)
class SupervoxelGraph:
    case_id: CaseId
    dims: tuple[int, int, int]
    centroids: np.ndarray  # (n, 3) float64, voxel space
    edges: np.ndarray  # (e, 2) int64, (src, dst) with dst among src's nearest
    patches: np.ndarray  # (n, 4P, nbr+3) float32
    labels: np.ndarray  # (n,) uint8
    tumor_fraction: np.ndarray  # (n,) float64
    voxel_offsets: np.ndarray  # (n+1,) int64, CSR offsets into voxel_index
    voxel_index: np.ndarray  # (offsets[n],) int64 flat voxel indices

    @property
    def n_nodes(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def voxels_of(self, node: int) -> np.ndarray:
        return self.voxel_index[self.voxel_offsets[node] : self.voxel_offsets[node + 1]]

    def equals(self, other: "SupervoxelGraph") -> bool:
        arrays = (
            "centroids",
            "edges",
            "patches",
            "labels",
            "tumor_fraction",
            "voxel_offsets",
            "voxel_index",
        )
        return (
            self.case_id == other.case_id
            and self.dims == other.dims
            and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
        )


@dataclass(frozen=True)
class PreprocessSummary:
    case_id: str
    n_supervoxels: int
    n_retained: int
    prune_threshold: float
    n_edges: int
    positive_fraction: float
