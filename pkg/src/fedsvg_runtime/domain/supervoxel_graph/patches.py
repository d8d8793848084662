from __future__ import annotations

import numpy as np

from fedsvg_runtime.domain.common.errors import SpecValidationError
from fedsvg_runtime.domain.common.rng import SALT_PATCHES, substream
from fedsvg_runtime.domain.supervoxel_graph.kmeanspp import kmeanspp_indices
from fedsvg_runtime.domain.supervoxel_graph.labels import voxel_map
from fedsvg_runtime.domain.supervoxel_graph.model import Labeling
from fedsvg_runtime.domain.volume_forge.config import MODALITIES
from fedsvg_runtime.domain.volume_forge.model import Volume


def voxel_coordinates(index: np.ndarray, dims: tuple[int, int, int]) -> np.ndarray:
    dx, dy, _ = dims
    return np.stack([index % dx, (index // dx) % dy, index // (dx * dy)], axis=1)


def node_patches(
    members: np.ndarray,
    intensities: np.ndarray,
    dims: tuple[int, int, int],
    n_patches: int,
    patch_voxels: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Patch tensor (4·P, nbr+3) of one supervoxel.

    Patch centroids are k-means++ seeds over member voxel coordinates, shared by
    all modalities. Each row holds the ``patch_voxels`` member intensities
    nearest to its centroid (ties by voxel index, padded with the nearest voxel)
    followed by the centroid coordinates divided by the volume dims.
    """
    if len(members) == 0:
        raise SpecValidationError("supervoxel", "is empty")
    coords = voxel_coordinates(members, dims).astype(np.float64)
    seeds = coords[kmeanspp_indices(coords, n_patches, rng)]
    sq = ((seeds[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2)
    # members ascend by voxel index, so a stable sort breaks distance ties by index
    nearest = np.argsort(sq, axis=1, kind="stable")[:, :patch_voxels]
    if nearest.shape[1] < patch_voxels:
        pad = np.repeat(nearest[:, :1], patch_voxels - nearest.shape[1], axis=1)
        nearest = np.concatenate([nearest, pad], axis=1)
    position = seeds / np.asarray(dims, dtype=np.float64)
    rows = []
    for m in range(len(MODALITIES)):
        values = intensities[m][members][nearest]
        rows.append(np.concatenate([values, position], axis=1))
    return np.concatenate(rows, axis=0).astype(np.float32)


def extract_patches(
    volume: Volume,
    labeling: Labeling,
    retained: np.ndarray,
    n_patches: int = 90,
    patch_voxels: int = 45,
    seed: int = 0,
) -> np.ndarray:
    if len(retained) == 0:
        raise SpecValidationError("retained", "must be nonempty")
    offsets, index = voxel_map(labeling, retained)
    intensities = np.stack([volume.channels[m].ravel(order="F") for m in range(len(MODALITIES))])
    out = np.empty((len(retained), len(MODALITIES) * n_patches, patch_voxels + 3), dtype=np.float32)
    for node in range(len(retained)):
        members = index[offsets[node] : offsets[node + 1]]
        out[node] = node_patches(
            members, intensities, volume.dims, n_patches, patch_voxels, substream(seed, node, salt=SALT_PATCHES)
        )
    return out
