from __future__ import annotations

import numpy as np

from fedsvg_runtime.domain.common.errors import SpecValidationError
from fedsvg_runtime.domain.supervoxel_graph.model import PRUNED, Labeling


def supervoxel_centroids(labeling: Labeling, retained: np.ndarray) -> np.ndarray:
    """Mean voxel coordinate (x, y, z) of each retained supervoxel."""
    grid = np.meshgrid(*(np.arange(d, dtype=np.float64) for d in labeling.dims), indexing="ij")
    flat = labeling.flat().astype(np.int64)
    keep = flat != np.int64(PRUNED)
    counts = np.bincount(flat[keep], minlength=labeling.n_labels).astype(np.float64)
    centroids = np.empty((len(retained), 3), dtype=np.float64)
    for axis in range(3):
        sums = np.bincount(flat[keep], weights=grid[axis].ravel(order="F")[keep], minlength=labeling.n_labels)
        centroids[:, axis] = sums[retained] / counts[retained]
    return centroids


def knn_edges(centroids: np.ndarray, k: int) -> np.ndarray:
    """Directed edges (i, j) from every node to its k nearest others.

    Ties in distance go to the lower node id; with fewer than k+1 nodes every
    node links to all others.
    """
    n = len(centroids)
    if n < 2:
        raise SpecValidationError("retained", f"need at least 2 nodes to build a graph, got {n}")
    degree = min(k, n - 1)
    sq = ((centroids[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(sq, np.inf)
    ids = np.arange(n)
    edges = np.empty((n * degree, 2), dtype=np.int64)
    for i in range(n):
        order = np.lexsort((ids, sq[i]))[:degree]
        edges[i * degree : (i + 1) * degree, 0] = i
        edges[i * degree : (i + 1) * degree, 1] = order
    return edges


def symmetrize(edges: np.ndarray) -> np.ndarray:
    both = np.concatenate([edges, edges[:, ::-1]], axis=0)
    return np.unique(both, axis=0)


def build_graph(labeling: Labeling, retained: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    if len(retained) < 2:
        raise SpecValidationError("retained", f"need at least 2 nodes to build a graph, got {len(retained)}")
    centroids = supervoxel_centroids(labeling, retained)
    return centroids, knn_edges(centroids, k)
