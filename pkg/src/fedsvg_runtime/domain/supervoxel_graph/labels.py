from __future__ import annotations

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError
from fedsvg_runtime.domain.supervoxel_graph.model import PRUNED, Labeling


def voxel_map(labeling: Labeling, retained: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR (offsets, flat voxel indices) of the retained supervoxels, members ascending."""
    flat = labeling.flat().astype(np.int64)
    order = np.argsort(flat, kind="stable")
    counts = np.bincount(flat[flat != np.int64(PRUNED)], minlength=labeling.n_labels)
    starts = np.concatenate([[0], np.cumsum(counts)])
    pieces = [order[starts[r] : starts[r + 1]] for r in retained]
    offsets = np.concatenate([[0], np.cumsum([len(p) for p in pieces])]).astype(np.int64)
    index = np.concatenate(pieces).astype(np.int64) if pieces else np.zeros(0, dtype=np.int64)
    return offsets, index


def assign_labels(
    labeling: Labeling, retained: np.ndarray, mask: np.ndarray, tau: float = 0.20, strict: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Binary node labels from the tumor fraction of each retained supervoxel."""
    if mask.shape != labeling.label_of.shape:
        raise ShapeMismatchError(f"mask shape {mask.shape} does not match labeling {labeling.label_of.shape}")
    flat = labeling.flat()
    keep = flat != PRUNED
    ids = flat[keep].astype(np.int64)
    tumor = np.bincount(ids, weights=mask.ravel(order="F")[keep].astype(np.float64), minlength=labeling.n_labels)
    counts = np.bincount(ids, minlength=labeling.n_labels)
    fraction = tumor[retained] / counts[retained]
    labels = (fraction > tau) if strict else (fraction >= tau)
    return labels.astype(np.uint8), fraction
