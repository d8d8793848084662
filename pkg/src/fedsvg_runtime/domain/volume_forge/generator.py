"""Deterministic synthetic stand-ins for multimodal brain MRI cases.

Draw order per volume (all from the volume substream of ``(seed, index)``): tumor count, then
per tumor the lobe count, radius and center followed by each extra lobe's
offset and radius and every lobe's semi-axis jitter, then one Gaussian noise
field per modality in ``MODALITIES`` order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from fedsvg_runtime.domain.common.ids import CaseId
from fedsvg_runtime.domain.common.rng import SALT_VOLUME, substream
from fedsvg_runtime.domain.volume_forge.config import MODALITIES, SynthSpec
from fedsvg_runtime.domain.volume_forge.model import Volume

logger = logging.getLogger(__name__)


def case_id_for(index: int) -> CaseId:
    return CaseId(f"case_{index:04d}")


def _grid(dims: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return np.meshgrid(*(np.arange(d, dtype=np.float64) for d in dims), indexing="ij")


def _ellipsoid(grid, center: np.ndarray, axes: np.ndarray) -> np.ndarray:
    x, y, z = grid
    return (
        ((x - center[0]) / axes[0]) ** 2
        + ((y - center[1]) / axes[1]) ** 2
        + ((z - center[2]) / axes[2]) ** 2
    ) <= 1.0


def _brain_axes(spec: SynthSpec) -> np.ndarray:
    half = (np.asarray(spec.dims, dtype=np.float64) - 1.0) / 2.0
    return half * (spec.brain_radius_fraction or 1.0)


def _tumor_mask(spec: SynthSpec, rng: np.random.Generator, grid) -> np.ndarray:
    mask = np.zeros(spec.dims, dtype=bool)
    lo, hi = spec.tumor_count_range
    n_tumors = int(rng.integers(lo, hi + 1))
    middle = (np.asarray(spec.dims, dtype=np.float64) - 1.0) / 2.0
    brain = _brain_axes(spec)
    for _ in range(n_tumors):
        n_lobes = int(rng.integers(spec.lobes_range[0], spec.lobes_range[1] + 1))
        radius = float(rng.uniform(*spec.tumor_radius_range))
        extent = radius * (1.0 + spec.tumor_anisotropy)
        # uniform point in the ellipsoid that keeps the whole tumor inside the brain
        direction = rng.normal(size=3)
        direction /= max(np.linalg.norm(direction), 1e-12)
        reach = np.maximum(brain - extent, 0.0) * rng.uniform() ** (1.0 / 3.0)
        center = np.round(middle + direction * reach)
        lobes = [(center, radius)]
        for _ in range(n_lobes - 1):
            step = rng.normal(size=3)
            step /= max(np.linalg.norm(step), 1e-12)
            lobe_radius = radius * float(rng.uniform(0.5, 0.8))
            lobe_center = np.round(center + step * (radius - lobe_radius))
            lobes.append((lobe_center, lobe_radius))
        for lobe_center, lobe_radius in lobes:
            jitter = rng.uniform(-1.0, 1.0, size=3) * spec.tumor_anisotropy
            mask |= _ellipsoid(grid, lobe_center, lobe_radius * (1.0 + jitter))
    return mask


def synth_volume(spec: SynthSpec, index: int) -> Volume:
    """Generate volume ``index`` of the dataset described by ``spec``."""
    rng = substream(spec.seed, index, salt=SALT_VOLUME)
    grid = _grid(spec.dims)
    mask = _tumor_mask(spec, rng, grid)
    if spec.brain_radius_fraction is not None:
        brain = _ellipsoid(grid, (np.asarray(spec.dims, dtype=np.float64) - 1.0) / 2.0, _brain_axes(spec))
    else:
        brain = np.ones(spec.dims, dtype=bool)
    mask &= brain

    channels = np.empty((len(MODALITIES), *spec.dims), dtype=np.float32)
    for c, modality in enumerate(MODALITIES):
        contrast = spec.modality_contrast[modality]
        value = np.full(spec.dims, contrast.tissue_mean, dtype=np.float64)
        value += contrast.tumor_delta * mask
        value += rng.normal(0.0, contrast.noise_sd, size=spec.dims) if contrast.noise_sd > 0 else 0.0
        value = np.where(brain, np.clip(value, 0.0, 1.0), 0.0)
        channels[c] = value.astype(np.float32)
    return Volume(case_id=case_id_for(index), channels=channels, mask=mask.astype(np.uint8))


def synth_dataset(spec: SynthSpec, threads: int = 1) -> Sequence[Volume]:
    """Generate ``spec.n_volumes`` volumes; independent substreams make order irrelevant."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            volumes = list(pool.map(lambda i: synth_volume(spec, i), range(spec.n_volumes)))
    else:
        volumes = [synth_volume(spec, i) for i in range(spec.n_volumes)]
    for volume in volumes:
        logger.debug("synthesized %s tumor_voxels=%d", volume.case_id, int(volume.mask.sum()))
    return volumes
