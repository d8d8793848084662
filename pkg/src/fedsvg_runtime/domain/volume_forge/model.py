from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fedsvg_runtime.domain.common.ids import CaseId
from fedsvg_runtime.domain.volume_forge.config import MODALITIES


def flat_index(x: np.ndarray, y: np.ndarray, z: np.ndarray, dims: tuple[int, int, int]) -> np.ndarray:
    """Voxel index in x-fastest order, the order used by every on-disk array."""
    dx, dy, _ = dims
    return x + dx * (y + dy * z)


@dataclass(frozen=True, eq=False)
class Volume:
    """Four co-registered modalities plus a binary tumor mask.

    ``channels`` has shape (4, dx, dy, dz) in the order of ``MODALITIES``;
    ``mask`` has shape (dx, dy, dz). Intensities are float32 in [0, 1].
    """

    case_id: CaseId
    channels: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        if self.channels.ndim != 4 or self.channels.shape[0] != len(MODALITIES):
            raise ValueError(f"channels must have shape (4, dx, dy, dz), got {self.channels.shape}")
        if self.channels.shape[1:] != self.mask.shape:
            raise ValueError(f"mask shape {self.mask.shape} does not match channels {self.channels.shape}")

    @property
    def dims(self) -> tuple[int, int, int]:
        dx, dy, dz = self.mask.shape
        return (int(dx), int(dy), int(dz))

    @property
    def n_voxels(self) -> int:
        return int(self.mask.size)

    def channel(self, modality: str) -> np.ndarray:
        return self.channels[MODALITIES.index(modality)]

    def equals(self, other: "Volume") -> bool:
        return (
            self.case_id == other.case_id
            and self.channels.dtype == other.channels.dtype
            and np.array_equal(self.channels, other.channels)
            and np.array_equal(self.mask, other.mask)
        )
