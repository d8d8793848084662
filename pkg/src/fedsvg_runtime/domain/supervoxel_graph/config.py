from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class GraphConfig(BaseModel):
    """Constants of the volume → supervoxel graph pipeline.

    Defaults are desk scale (32³ volumes); the full-resolution values are
    n_supervoxels=4000 with everything else unchanged.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_supervoxels: int = Field(default=200, ge=8)
    compactness: float = Field(default=10.0, gt=0.0)
    slic_iters: int = Field(default=10, ge=1)
    k_neighbors: int = Field(default=8, ge=1)
    n_patches: int = Field(default=90, ge=1)
    patch_voxels: int = Field(default=45, ge=1)
    tau: float = Field(default=0.20, ge=0.0, le=1.0)
    # ">" instead of ">=" when comparing tumor fraction with tau
    strict_tau: bool = False
    symmetrize_edges: bool = False
    # orphan components below this fraction of S³ are merged into a neighbor
    min_component_fraction: float = Field(default=0.25, ge=0.0)
