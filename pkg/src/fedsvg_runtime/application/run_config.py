from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fedsvg_runtime.domain.federation.config import TrainingConfig
from fedsvg_runtime.domain.federation.models import PartitionPlan
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.supervoxel_graph.config import GraphConfig
from fedsvg_runtime.domain.volume_forge.config import SynthSpec


class PathsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    volumes_dir: str = "data/volumes"
    graphs_dir: str = "data/graphs"
    runs_dir: str = "runs"


class RunConfig(BaseModel):
    """Every constant of a pipeline run; one JSON document."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(default=20240601, ge=0)
    threads: int = Field(default=1, ge=1)
    precision: Literal["float32", "float64"] = "float32"
    repeats: int = Field(default=1, ge=1)
    synth: SynthSpec = SynthSpec()
    graph: GraphConfig = GraphConfig()
    model: ModelConfig = ModelConfig()
    training: TrainingConfig = TrainingConfig()
    partition: PartitionPlan = PartitionPlan()
    paths: PathsConfig = PathsConfig()

    @model_validator(mode="after")
    def _check_sections(self) -> "RunConfig":
        if self.model.pe_dim >= self.graph.n_supervoxels:
            raise ValueError("model.pe_dim must be smaller than graph.n_supervoxels")
        if self.partition.n_clients > self.synth.n_volumes:
            raise ValueError("partition has more clients than synth.n_volumes")
        return self

    @property
    def patch_features(self) -> int:
        return self.graph.patch_voxels + 3
