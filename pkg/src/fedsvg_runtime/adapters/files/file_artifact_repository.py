from __future__ import annotations

import logging
from pathlib import Path

from fedsvg_runtime.application.errors import MissingArtifactError
from fedsvg_runtime.domain.supervoxel_graph.codec import read_graph, write_graph
from fedsvg_runtime.domain.supervoxel_graph.model import SupervoxelGraph
from fedsvg_runtime.domain.volume_forge.codec import read_volume, write_volume
from fedsvg_runtime.domain.volume_forge.model import Volume
from fedsvg_runtime.ports.artifact_repository import ArtifactRepository

logger = logging.getLogger(__name__)

VOLUME_SUFFIX = ".mmv"
GRAPH_SUFFIX = ".svg1"


class FileArtifactRepository(ArtifactRepository):
    """Volumes and graphs as one binary file per case."""

    def __init__(self, volumes_dir: str | Path, graphs_dir: str | Path) -> None:
        self.volumes_dir = Path(volumes_dir)
        self.graphs_dir = Path(graphs_dir)

    def volume_path(self, case_id: str) -> Path:
        return self.volumes_dir / f"{case_id}{VOLUME_SUFFIX}"

    def graph_path(self, case_id: str) -> Path:
        return self.graphs_dir / f"{case_id}{GRAPH_SUFFIX}"

    def write_volume(self, volume: Volume) -> str:
        self.volumes_dir.mkdir(parents=True, exist_ok=True)
        path = self.volume_path(volume.case_id)
        write_volume(volume, path)
        return str(path)

    def read_volume(self, case_id: str) -> Volume:
        path = self.volume_path(case_id)
        if not path.exists():
            raise MissingArtifactError(f"volume {case_id} not found", [str(path)])
        return read_volume(path)

    def list_volumes(self) -> list[str]:
        return self._list(self.volumes_dir, VOLUME_SUFFIX, "volumes")

    def write_graph(self, graph: SupervoxelGraph) -> str:
        self.graphs_dir.mkdir(parents=True, exist_ok=True)
        path = self.graph_path(graph.case_id)
        write_graph(graph, path)
        return str(path)

    def read_graph(self, case_id: str) -> SupervoxelGraph:
        path = self.graph_path(case_id)
        if not path.exists():
            raise MissingArtifactError(f"graph {case_id} not found", [str(path)])
        return read_graph(path)

    def list_graphs(self) -> list[str]:
        return self._list(self.graphs_dir, GRAPH_SUFFIX, "graphs")

    def _list(self, directory: Path, suffix: str, kind: str) -> list[str]:
        if not directory.is_dir():
            raise MissingArtifactError(f"no {kind} directory", [str(directory)])
        cases = sorted(p.name[: -len(suffix)] for p in directory.glob(f"*{suffix}"))
        if not cases:
            raise MissingArtifactError(f"no {kind} in {directory}", [str(directory)])
        return cases
