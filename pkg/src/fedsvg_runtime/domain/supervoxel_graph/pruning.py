from __future__ import annotations

import numpy as np

from fedsvg_runtime.domain.common.errors import SpecValidationError
from fedsvg_runtime.domain.supervoxel_graph.model import PRUNED, Labeling


def supervoxel_means(labeling: Labeling, channel: np.ndarray) -> np.ndarray:
    flat = labeling.flat()
    values = np.asarray(channel, dtype=np.float64).ravel(order="F")
    keep = flat != PRUNED
    ids = flat[keep].astype(np.int64)
    sums = np.bincount(ids, weights=values[keep], minlength=labeling.n_labels)
    counts = np.bincount(ids, minlength=labeling.n_labels)
    with np.errstate(invalid="ignore", divide="ignore"):
        return sums / counts


def largest_gap_threshold(means: np.ndarray) -> float:
    """Midpoint of the widest gap between consecutive sorted means."""
    ordered = np.sort(np.asarray(means, dtype=np.float64))
    gaps = np.diff(ordered)
    if len(gaps) == 0 or gaps.max() <= 0.0:
        return float(np.nextafter(ordered[0], -np.inf))
    i = int(np.argmax(gaps))
    return float((ordered[i] + ordered[i + 1]) / 2.0)


def prune_background(labeling: Labeling, t1: np.ndarray) -> tuple[np.ndarray, float]:
    """Ids of supervoxels whose mean T1 lies strictly above the largest-gap threshold."""
    means = supervoxel_means(labeling, t1)
    present = np.flatnonzero(labeling.sizes() > 0)
    if len(present) == 0:
        raise SpecValidationError("labeling", "has zero supervoxels")
    threshold = largest_gap_threshold(means[present])
    retained = present[means[present] > threshold]
    return retained, threshold
