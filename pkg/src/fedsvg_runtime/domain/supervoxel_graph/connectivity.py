from __future__ import annotations

import logging

import numpy as np
from scipy import ndimage

from fedsvg_runtime.domain.supervoxel_graph.model import PRUNED, Labeling

logger = logging.getLogger(__name__)

SIX_CONNECTED = ndimage.generate_binary_structure(3, 1)


def _expand(box: tuple[slice, ...], dims: tuple[int, ...]) -> tuple[slice, ...]:
    return tuple(slice(max(s.start - 1, 0), min(s.stop + 1, d)) for s, d in zip(box, dims))


def _offset(inner: tuple[slice, ...], outer: tuple[slice, ...]) -> tuple[slice, ...]:
    return tuple(slice(o.start + i.start, o.start + i.stop) for i, o in zip(inner, outer))


def compact_ids(segments: np.ndarray, valid: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber segment ids 0..n-1 by first occurrence in x-fastest order."""
    flat = segments.ravel(order="F")
    mask = valid.ravel(order="F")
    ids, first = np.unique(flat[mask], return_index=True)
    rank = np.empty(len(ids), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(ids))
    out = np.full(segments.shape, PRUNED, dtype=np.uint32)
    out[valid] = rank[np.searchsorted(ids, segments[valid])].astype(np.uint32)
    return out, len(ids)


def enforce_connectivity(labeling: Labeling, min_size: float | None = None) -> Labeling:
    """Make every label 6-connected.

    The largest component of each label keeps it; other components of at least
    ``min_size`` voxels become labels of their own and smaller ones (orphans) are
    merged into their largest 6-adjacent neighbor. Ids are compacted afterwards.
    ``min_size`` defaults to S³/4 with S³ = voxels per present label.
    """
    label_of = labeling.label_of
    dims = label_of.shape
    valid = label_of != PRUNED
    shifted = np.where(valid, label_of.astype(np.int64) + 1, 0)
    if min_size is None:
        n_present = max(len(np.unique(shifted[valid])), 1)
        min_size = 0.25 * labeling.n_voxels / n_present

    segments = np.full(dims, -1, dtype=np.int64)
    sizes: list[int] = []
    boxes: list[tuple[slice, ...]] = []
    orphan: list[bool] = []
    for label, box in enumerate(ndimage.find_objects(shifted)):
        if box is None:
            continue
        components, n = ndimage.label(shifted[box] == label + 1, structure=SIX_CONNECTED)
        counts = np.bincount(components.ravel(), minlength=n + 1)[1:]
        main = int(np.argmax(counts))
        for c, inner in enumerate(ndimage.find_objects(components)):
            seg_id = len(sizes)
            view = segments[box]
            view[components == c + 1] = seg_id
            sizes.append(int(counts[c]))
            boxes.append(_offset(inner, box))
            orphan.append(c != main and counts[c] < min_size)

    size_arr = np.asarray(sizes, dtype=np.int64)
    pending = [s for s, is_orphan in enumerate(orphan) if is_orphan]
    unresolved = np.asarray(orphan, dtype=bool)
    merged = 0
    while pending:
        waiting = []
        for s in pending:
            window = _expand(boxes[s], dims)
            view = segments[window]
            region = view == s
            ring = ndimage.binary_dilation(region, structure=SIX_CONNECTED) & ~region
            neighbors = view[ring]
            neighbors = np.unique(neighbors[neighbors >= 0])
            neighbors = neighbors[~unresolved[neighbors]]
            if len(neighbors) == 0:
                waiting.append(s)
                continue
            target = neighbors[np.lexsort((neighbors, -size_arr[neighbors]))[0]]
            view[region] = target
            size_arr[target] += size_arr[s]
            unresolved[s] = False
            merged += 1
        if len(waiting) == len(pending):
            # orphans with no settled neighbor (e.g. islands among pruned voxels) stand alone
            unresolved[waiting] = False
            break
        pending = waiting

    compacted, n_labels = compact_ids(segments, valid)
    logger.debug("enforce_connectivity segments=%d merged=%d labels=%d", len(sizes), merged, n_labels)
    return Labeling(label_of=compacted, n_labels=n_labels)
