from __future__ import annotations

from dataclasses import dataclass
from importlib import metadata
from pathlib import Path
from typing import Optional

from fedsvg_runtime.domain.common.hashing import sha256_file
from fedsvg_runtime.domain.common.ids import RunId


def package_version() -> str:
    try:
        return metadata.version("fedsvg-runtime")
    except metadata.PackageNotFoundError:
        return "0.0.0+local"


@dataclass(frozen=True)
class RunContext:
    command: str
    run_id: RunId
    seed: int
    config_hash: str
    paradigm: Optional[str] = None

    @classmethod
    def from_args(
        cls, command: str, seed: int, config_hash: str, paradigm: Optional[str] = None
    ) -> "RunContext":
        parts = [command] + ([paradigm] if paradigm else []) + [f"seed{seed}"]
        return cls(
            command=command,
            run_id=RunId("-".join(parts)),
            seed=seed,
            config_hash=config_hash,
            paradigm=paradigm,
        )

    def manifest(self, artifacts: list[Path], inputs: Optional[list[Path]] = None) -> dict:
        """Everything needed to reproduce the command: config hash, seed and artifact hashes."""
        return {
            "run_id": self.run_id.value,
            "command": self.command,
            "paradigm": self.paradigm,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "package_version": package_version(),
            "inputs": [{"path": p.name, "sha256": sha256_file(p)} for p in sorted(inputs or [])],
            "artifacts": [{"path": p.name, "sha256": sha256_file(p)} for p in sorted(artifacts)],
        }
