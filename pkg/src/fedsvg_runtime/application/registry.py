from __future__ import annotations

from typing import Callable, Dict

from fedsvg_runtime.application.errors import SpecValidationError
from fedsvg_runtime.application.paradigms import (
    ParadigmResult,
    TrainingData,
    run_centralized,
    run_federated,
    run_isolated,
)
from fedsvg_runtime.application.run_config import RunConfig

ParadigmFn = Callable[[TrainingData, RunConfig, int], ParadigmResult]


class Registry:
    def __init__(self) -> None:
        self._paradigms: Dict[str, ParadigmFn] = {}
        self.register("centralized", run_centralized)
        self.register("federated", run_federated)
        self.register("isolated", run_isolated)

    def register(self, name: str, fn: ParadigmFn) -> None:
        self._paradigms[name] = fn

    def get(self, name: str) -> ParadigmFn:
        if name not in self._paradigms:
            raise SpecValidationError("paradigm", f"{name!r} is not registered")
        return self._paradigms[name]

    @property
    def names(self) -> list[str]:
        return list(self._paradigms)
