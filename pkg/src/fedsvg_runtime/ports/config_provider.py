from __future__ import annotations

from typing import Protocol

from fedsvg_runtime.application.run_config import RunConfig


class ConfigProvider(Protocol):
    def get_config(self) -> RunConfig: ...

    def config_hash(self) -> str: ...
