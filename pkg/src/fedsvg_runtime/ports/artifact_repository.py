from __future__ import annotations

from pathlib import Path
from typing import Protocol

from fedsvg_runtime.domain.supervoxel_graph.model import SupervoxelGraph
from fedsvg_runtime.domain.volume_forge.model import Volume


class ArtifactRepository(Protocol):
    def write_volume(self, volume: Volume) -> str: ...

    def read_volume(self, case_id: str) -> Volume: ...

    def list_volumes(self) -> list[str]: ...

    def write_graph(self, graph: SupervoxelGraph) -> str: ...

    def read_graph(self, case_id: str) -> SupervoxelGraph: ...

    def list_graphs(self) -> list[str]: ...

    def volume_path(self, case_id: str) -> Path: ...

    def graph_path(self, case_id: str) -> Path: ...
