"""Laplacian eigenvector positional encodings."""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.sparse.csgraph import connected_components

from fedsvg_runtime.domain.common.errors import SpecValidationError


def adjacency(edges: np.ndarray, n_nodes: int) -> np.ndarray:
    """Symmetric 0/1 adjacency without self loops."""
    a = np.zeros((n_nodes, n_nodes))
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    a[edges[:, 0], edges[:, 1]] = 1.0
    a[edges[:, 1], edges[:, 0]] = 1.0
    np.fill_diagonal(a, 0.0)
    return a


def normalized_laplacian(edges: np.ndarray, n_nodes: int) -> np.ndarray:
    """``I - D^-1/2 A D^-1/2``; isolated nodes keep a unit diagonal."""
    a = adjacency(edges, n_nodes)
    degree = a.sum(axis=1)
    inv_sqrt = np.zeros_like(degree)
    np.divide(1.0, np.sqrt(degree), out=inv_sqrt, where=degree > 0)
    return np.eye(n_nodes) - inv_sqrt[:, None] * a * inv_sqrt[None, :]


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of every column made positive
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def laplacian_pe(
    edges: np.ndarray, n_nodes: int, k: int, rng: Optional[np.random.Generator] = None
) -> np.ndarray:
    """Eigenvectors of the k smallest nontrivial eigenvalues, shape (n_nodes, k).

    Edges are symmetrized first. One trivial (zero-eigenvalue) eigenvector is
    skipped per connected component, isolated nodes get zero rows, and columns
    are zero-padded when the graph has fewer than k nontrivial eigenvectors.
    Signs are canonical unless ``rng`` is given, in which case every column is
    flipped with probability 1/2.
    """
    if n_nodes <= k:
        raise SpecValidationError("pe_dim", f"needs more than {k} nodes, got {n_nodes}")
    a = adjacency(edges, n_nodes)
    connected = np.flatnonzero(a.sum(axis=1) > 0)
    pe = np.zeros((n_nodes, k))
    if connected.size:
        sub_edges = np.argwhere(np.triu(a[np.ix_(connected, connected)]) > 0)
        n_components, _ = connected_components(a[np.ix_(connected, connected)], directed=False)
        values, vectors = np.linalg.eigh(normalized_laplacian(sub_edges, connected.size))
        order = np.argsort(values, kind="stable")
        chosen = _canonical_signs(vectors[:, order[n_components : n_components + k]])
        pe[connected, : chosen.shape[1]] = chosen
    if rng is not None:
        pe = pe * rng.choice(np.array([-1.0, 1.0]), size=k)
    return pe
