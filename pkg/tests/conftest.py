from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from fedsvg_runtime.application.run_config import RunConfig
from fedsvg_runtime.domain.common.ids import CaseId
from fedsvg_runtime.domain.federation.models import CaseData
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.model.laplacian import laplacian_pe
from fedsvg_runtime.domain.supervoxel_graph.model import SupervoxelGraph

DIMS = (4, 4, 4)
N_PATCHES = 2
PATCH_VOXELS = 3


def build_graph(case_id: str = "case_0000", n_nodes: int = 6, seed: int = 0) -> SupervoxelGraph:
    """Hand-built graph: node i owns a contiguous run of flat voxels, kNN rows (i, i+1) and (i, i+2)."""
    rng = np.random.default_rng(seed)
    n_voxels = int(np.prod(DIMS))
    per_node = n_voxels // n_nodes
    offsets = np.arange(n_nodes + 1, dtype=np.int64) * per_node
    index = np.arange(offsets[-1], dtype=np.int64)
    edges = np.array(
        [(i, (i + step) % n_nodes) for i in range(n_nodes) for step in (1, 2)], dtype=np.int64
    )
    labels = (np.arange(n_nodes) % 3 == 0).astype(np.uint8)
    return SupervoxelGraph(
        case_id=CaseId(case_id),
        dims=DIMS,
        centroids=rng.uniform(0, 4, size=(n_nodes, 3)),
        edges=edges,
        patches=rng.normal(size=(n_nodes, 4 * N_PATCHES, PATCH_VOXELS + 3)).astype(np.float32),
        labels=labels,
        tumor_fraction=labels.astype(np.float64),
        voxel_offsets=offsets,
        voxel_index=index,
    )


def truth_mask(graph: SupervoxelGraph) -> np.ndarray:
    """Voxel mask tiled exactly by the positive supervoxels."""
    mask = np.zeros(int(np.prod(graph.dims)), dtype=bool)
    for node in np.flatnonzero(graph.labels):
        mask[graph.voxels_of(int(node))] = True
    return mask


@pytest.fixture
def tiny_model() -> ModelConfig:
    return ModelConfig(
        d_model=8,
        n_heads=2,
        n_embedder_layers=1,
        n_gnn_layers=2,
        pe_dim=2,
        ffn_mult=2,
        dropout=0.0,
        node_chunk=4,
    )


@pytest.fixture
def make_graph() -> Callable[..., SupervoxelGraph]:
    return build_graph


@pytest.fixture
def make_case(tiny_model: ModelConfig) -> Callable[..., CaseData]:
    def _make(case_id: str = "case_0000", n_nodes: int = 6, seed: int = 0) -> CaseData:
        graph = build_graph(case_id, n_nodes, seed)
        pe = laplacian_pe(graph.edges, graph.n_nodes, tiny_model.pe_dim)
        return CaseData(graph=graph, mask=truth_mask(graph), pe=pe)

    return _make


@pytest.fixture
def tiny_run_config(tiny_model: ModelConfig) -> RunConfig:
    return RunConfig.model_validate(
        {
            "seed": 3,
            "synth": {"n_volumes": 8, "dims": [16, 16, 16]},
            "graph": {"n_supervoxels": 16, "n_patches": N_PATCHES, "patch_voxels": PATCH_VOXELS},
            "model": tiny_model.model_dump(),
            "training": {
                "rounds": 3,
                "epochs": 3,
                "patience": 10,
                "lr": 0.01,
                "t0": 2,
                "batch_size": 2,
                "accumulation_steps": 1,
            },
        }
    )
