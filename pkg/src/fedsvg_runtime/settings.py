from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class Settings:
    """Process settings sourced from environment variables."""

    log_level: str = "INFO"
    threads: int = 1
    # float32 for training runs, float64 for gradient checks; None keeps the config value
    precision: Optional[str] = None
    # Bundled run configurations
    configs_dir: str = ""
    schemas_dir: str = ""

    @classmethod
    def from_env(cls) -> "Settings":
        # Find repo root by looking for pyproject.toml
        repo_root = None
        current = Path(__file__).resolve()
        for parent in current.parents:
            if (parent / "pyproject.toml").exists():
                repo_root = parent
                break
        if repo_root is None:
            # Fallback to current working directory
            repo_root = Path.cwd()

        return cls(
            log_level=os.getenv("LOG_LEVEL", cls.log_level),
            threads=int(os.getenv("FEDSVG_THREADS", cls.threads)),
            precision=os.getenv("FEDSVG_PRECISION") or None,
            configs_dir=os.getenv("FEDSVG_CONFIGS_DIR", str(repo_root / "configs")),
            schemas_dir=os.getenv("FEDSVG_SCHEMAS_DIR", str(repo_root / "schemas")),
        )


def get_settings(_cache: dict[str, Settings] = {}) -> Settings:
    """Provide a simple cached settings object."""

    if "settings" not in _cache:
        _cache["settings"] = Settings.from_env()
    return _cache["settings"]
