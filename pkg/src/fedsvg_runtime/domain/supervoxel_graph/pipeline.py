from __future__ import annotations

import logging

import numpy as np

from fedsvg_runtime.domain.supervoxel_graph.config import GraphConfig
from fedsvg_runtime.domain.supervoxel_graph.connectivity import enforce_connectivity
from fedsvg_runtime.domain.supervoxel_graph.knn import build_graph, symmetrize
from fedsvg_runtime.domain.supervoxel_graph.labels import assign_labels, voxel_map
from fedsvg_runtime.domain.supervoxel_graph.model import PreprocessSummary, SupervoxelGraph
from fedsvg_runtime.domain.supervoxel_graph.patches import extract_patches
from fedsvg_runtime.domain.supervoxel_graph.pruning import prune_background
from fedsvg_runtime.domain.supervoxel_graph.slic import grid_spacing, slic3d
from fedsvg_runtime.domain.volume_forge.model import Volume

logger = logging.getLogger(__name__)


def build_supervoxel_graph(
    volume: Volume, config: GraphConfig, seed: int
) -> tuple[SupervoxelGraph, PreprocessSummary]:
    """SLIC on T1, connectivity, background pruning, kNN graph, patches and labels."""
    t1 = volume.channel("T1")
    raw = slic3d(t1, config.n_supervoxels, config.compactness, config.slic_iters, seed)
    spacing = grid_spacing(volume.n_voxels, config.n_supervoxels)
    labeling = enforce_connectivity(raw, min_size=config.min_component_fraction * spacing**3)
    retained, threshold = prune_background(labeling, t1)
    centroids, edges = build_graph(labeling, retained, config.k_neighbors)
    if config.symmetrize_edges:
        edges = symmetrize(edges)
    patches = extract_patches(volume, labeling, retained, config.n_patches, config.patch_voxels, seed)
    labels, fraction = assign_labels(labeling, retained, volume.mask, config.tau, config.strict_tau)
    offsets, index = voxel_map(labeling, retained)

    graph = SupervoxelGraph(
        case_id=volume.case_id,
        dims=volume.dims,
        centroids=centroids,
        edges=edges,
        patches=patches,
        labels=labels,
        tumor_fraction=fraction,
        voxel_offsets=offsets,
        voxel_index=index,
    )
    summary = PreprocessSummary(
        case_id=volume.case_id,
        n_supervoxels=labeling.n_labels,
        n_retained=len(retained),
        prune_threshold=threshold,
        n_edges=graph.n_edges,
        positive_fraction=float(np.mean(labels)) if len(labels) else 0.0,
    )
    logger.info(
        "preprocessed %s supervoxels=%d nodes=%d edges=%d threshold=%.4f",
        volume.case_id,
        summary.n_supervoxels,
        summary.n_retained,
        summary.n_edges,
        threshold,
    )
    return graph, summary
