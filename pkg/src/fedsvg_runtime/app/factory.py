from __future__ import annotations

from pathlib import Path
from typing import Optional

from fedsvg_runtime.adapters.config.file_config_provider import FileConfigProvider
from fedsvg_runtime.adapters.files.file_artifact_repository import FileArtifactRepository
from fedsvg_runtime.adapters.outputs.file_outputs_repository import FileOutputsRepository
from fedsvg_runtime.application.registry import Registry
from fedsvg_runtime.application.runner import Runner
from fedsvg_runtime.settings import get_settings


def resolve_config_path(config: Optional[str]) -> Optional[str]:
    """A bare name such as ``smoke`` refers to a bundled file in the configs directory."""
    if config is None or Path(config).suffix or Path(config).exists():
        return config
    return str(Path(get_settings().configs_dir) / f"{config}.json")


def create_adapters(
    config_path: Optional[str] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    out_dir: Optional[str] = None,
    repeats: Optional[int] = None,
) -> tuple[FileConfigProvider, FileArtifactRepository]:
    """
    Config provider and artifact store rooted at the configured data directories.

    CLI flags win over FEDSVG_THREADS / FEDSVG_PRECISION, which win over the
    config file.
    """
    settings = get_settings()
    if threads is None and settings.threads > 1:
        threads = settings.threads
    config_provider = FileConfigProvider(
        resolve_config_path(config_path),
        seed=seed,
        threads=threads,
        out_dir=out_dir,
        repeats=repeats,
        precision=settings.precision,
    )
    config = config_provider.get_config()
    artifacts = FileArtifactRepository(config.paths.volumes_dir, config.paths.graphs_dir)
    return config_provider, artifacts


def create_runner(
    config_path: Optional[str] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    out_dir: Optional[str] = None,
    repeats: Optional[int] = None,
) -> Runner:
    config_provider, artifacts = create_adapters(config_path, seed, threads, out_dir, repeats)
    schemas_dir = get_settings().schemas_dir

    def outputs_factory(run_dir: Path) -> FileOutputsRepository:
        return FileOutputsRepository(run_dir, schemas_dir=schemas_dir)

    return Runner(
        config_provider=config_provider,
        artifacts=artifacts,
        outputs_factory=outputs_factory,
        registry=Registry(),
    )
