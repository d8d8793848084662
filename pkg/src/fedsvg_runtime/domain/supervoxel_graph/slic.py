"""3D SLIC over one intensity channel.

Standard choices where the pipeline description is silent: centers start on a
regular grid of spacing S = (n_voxels / K)^(1/3) and, when S >= 3, move to the
lowest-gradient voxel of their 3×3×3 neighborhood; each center competes for the
voxels of a 2S-wide window around it. The algorithm draws no random numbers.
"""

from __future__ import annotations

import logging

import numpy as np

from fedsvg_runtime.domain.common.errors import SpecValidationError
from fedsvg_runtime.domain.supervoxel_graph.model import Labeling

logger = logging.getLogger(__name__)


def grid_spacing(n_voxels: int, k: int) -> float:
    return (n_voxels / k) ** (1.0 / 3.0)


def _gradient_magnitude(channel: np.ndarray) -> np.ndarray:
    padded = np.pad(channel, 1, mode="edge")
    core = (slice(1, -1),) * 3
    total = np.zeros_like(channel)
    for axis in range(3):
        ahead = list(core)
        behind = list(core)
        ahead[axis] = slice(2, None)
        behind[axis] = slice(None, -2)
        total += (padded[tuple(ahead)] - padded[tuple(behind)]) ** 2
    return total


def _initial_centers(dims: tuple[int, int, int], spacing: float) -> np.ndarray:
    axes = []
    for d in dims:
        count = max(1, int(round(d / spacing)))
        axes.append((np.arange(count) + 0.5) * d / count - 0.5)
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel(order="F") for g in grid], axis=1)


def _perturb(centers: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    dims = np.asarray(gradient.shape)
    moved = centers.copy()
    for k, center in enumerate(centers):
        voxel = np.clip(np.rint(center).astype(np.int64), 0, dims - 1)
        lo = np.maximum(voxel - 1, 0)
        hi = np.minimum(voxel + 2, dims)
        window = gradient[lo[0] : hi[0], lo[1] : hi[1], lo[2] : hi[2]]
        best = np.unravel_index(int(np.argmin(window)), window.shape)
        if window[best] < gradient[tuple(voxel)]:
            moved[k] = lo + np.asarray(best)
    return moved


def _assign(
    channel: np.ndarray, centers: np.ndarray, center_values: np.ndarray, spacing: float, compactness: float
) -> np.ndarray:
    dims = np.asarray(channel.shape)
    weight = (compactness / spacing) ** 2
    best = np.full(channel.shape, np.inf)
    labels = np.full(channel.shape, -1, dtype=np.int64)
    for k, (center, value) in enumerate(zip(centers, center_values)):
        lo = np.maximum(np.floor(center - spacing).astype(np.int64), 0)
        hi = np.minimum(np.ceil(center + spacing).astype(np.int64) + 1, dims)
        window = tuple(slice(a, b) for a, b in zip(lo, hi))
        ax = (np.arange(lo[0], hi[0]) - center[0]) ** 2
        ay = (np.arange(lo[1], hi[1]) - center[1]) ** 2
        az = (np.arange(lo[2], hi[2]) - center[2]) ** 2
        spatial = ax[:, None, None] + ay[None, :, None] + az[None, None, :]
        distance = (channel[window] - value) ** 2 + weight * spatial
        best_view = best[window]
        label_view = labels[window]
        closer = distance < best_view
        best_view[closer] = distance[closer]
        label_view[closer] = k

    orphans = np.argwhere(labels < 0)
    if len(orphans):
        # voxels no window reached: nearest center over all centers
        spatial = ((orphans[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        values = channel[tuple(orphans.T)]
        distance = (values[:, None] - center_values[None, :]) ** 2 + weight * spatial
        labels[tuple(orphans.T)] = np.argmin(distance, axis=1)
    return labels


def slic3d(
    channel: np.ndarray, k: int, compactness: float = 10.0, iters: int = 10, seed: int | None = None
) -> Labeling:
    """Partition ``channel`` into roughly ``k`` locally uniform supervoxels.

    Centers move to the lowest-gradient voxel of their 3×3×3 neighborhood only
    when the grid spacing S is at least 3; below that the neighborhoods of
    adjacent centers overlap and the move could stack two centers on one voxel.
    ``seed`` is accepted like every other pipeline step takes it, but grid
    seeding draws no random numbers, so the labeling does not depend on it.
    """
    channel = np.asarray(channel, dtype=np.float64)
    n_voxels = channel.size
    if k < 8:
        raise SpecValidationError("K", f"must be at least 8, got {k}")
    if k > n_voxels:
        raise SpecValidationError("K", f"{k} exceeds voxel count {n_voxels}")

    spacing = grid_spacing(n_voxels, k)
    centers = _initial_centers(channel.shape, spacing)
    if spacing >= 3.0:
        centers = _perturb(centers, _gradient_magnitude(channel))
    dims = np.asarray(channel.shape)
    center_values = channel[tuple(np.clip(np.rint(centers).astype(np.int64), 0, dims - 1).T)]

    grid = np.meshgrid(*(np.arange(d, dtype=np.float64) for d in channel.shape), indexing="ij")
    labels = np.zeros(channel.shape, dtype=np.int64)
    for _ in range(iters):
        labels = _assign(channel, centers, center_values, spacing, compactness)
        flat = labels.ravel()
        counts = np.bincount(flat, minlength=len(centers)).astype(np.float64)
        filled = counts > 0
        for axis in range(3):
            sums = np.bincount(flat, weights=grid[axis].ravel(), minlength=len(centers))
            centers[filled, axis] = sums[filled] / counts[filled]
        sums = np.bincount(flat, weights=channel.ravel(), minlength=len(centers))
        center_values[filled] = sums[filled] / counts[filled]

    logger.debug("slic3d k=%d spacing=%.3f centers=%d", k, spacing, len(centers))
    return Labeling(label_of=labels.astype(np.uint32), n_labels=len(centers))
