from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from fedsvg_runtime.application.errors import ConfigValidationError, MissingArtifactError
from fedsvg_runtime.application.run_config import PathsConfig, RunConfig
from fedsvg_runtime.domain.common.hashing import sha256_json
from fedsvg_runtime.ports.config_provider import ConfigProvider

logger = logging.getLogger(__name__)


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    location = ".".join(str(part) for part in error["loc"]) or "<root>"
    return f"{location}: {error['msg']}"


def parse_config(data: dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigValidationError(_first_error(exc)) from exc


class FileConfigProvider(ConfigProvider):
    """Loads a RunConfig from a JSON file (or defaults) and applies CLI overrides."""

    def __init__(
        self,
        config_path: Optional[str] = None,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        out_dir: Optional[str] = None,
        repeats: Optional[int] = None,
        precision: Optional[str] = None,
    ) -> None:
        self.config_path = Path(config_path) if config_path else None
        self.overrides = {"seed": seed, "threads": threads, "repeats": repeats, "precision": precision}
        self.out_dir = out_dir
        self._config: Optional[RunConfig] = None

    def _load(self) -> dict[str, Any]:
        if self.config_path is None:
            return {}
        if not self.config_path.exists():
            raise MissingArtifactError("config file not found", [str(self.config_path)])
        try:
            with self.config_path.open("r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigValidationError(f"{self.config_path}: invalid JSON ({exc.msg})") from exc
        if not isinstance(data, dict):
            raise ConfigValidationError(f"{self.config_path}: top level must be an object")
        return data

    def get_config(self) -> RunConfig:
        if self._config is None:
            config = parse_config(self._load())
            update: dict[str, Any] = {k: v for k, v in self.overrides.items() if v is not None}
            if self.out_dir is not None:
                root = Path(self.out_dir)
                update["paths"] = PathsConfig(
                    volumes_dir=str(root / "volumes"),
                    graphs_dir=str(root / "graphs"),
                    runs_dir=str(root / "runs"),
                )
            if update:
                # overrides pass the same validators as the file
                config = parse_config({**config.model_dump(), **_dumped(update)})
            self._config = config
            logger.info("config loaded from %s", self.config_path or "<defaults>")
        return self._config

    def config_hash(self) -> str:
        return sha256_json(self.get_config().model_dump(mode="json"))


def _dumped(update: dict[str, Any]) -> dict[str, Any]:
    return {k: (v.model_dump() if isinstance(v, PathsConfig) else v) for k, v in update.items()}
