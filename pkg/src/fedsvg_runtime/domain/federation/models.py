from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fedsvg_runtime.domain.common.ids import ClientId
from fedsvg_runtime.domain.supervoxel_graph.model import SupervoxelGraph
from fedsvg_runtime.domain.tensor_autodiff.optim import AdamWState
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore

PARADIGMS = ("centralized", "federated", "isolated")


class PartitionPlan(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    fractions: tuple[float, ...] = (0.18, 0.22, 0.35, 0.25)
    train_fraction: float = Field(default=0.8, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_fractions(self) -> "PartitionPlan":
        if not self.fractions:
            raise ValueError("fractions must not be empty")
        if any(f <= 0 for f in self.fractions):
            raise ValueError("fractions must be positive")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError(f"fractions sum to {sum(self.fractions)}, expected 1")
        return self

    @property
    def n_clients(self) -> int:
        return len(self.fractions)


@dataclass(frozen=True)
class ClientSplit:
    client_id: ClientId
    train: tuple[str, ...]
    test: tuple[str, ...]

    @property
    def cases(self) -> tuple[str, ...]:
        return self.train + self.test


@dataclass(frozen=True, eq=False)
class CaseData:
    """A preprocessed graph with what training and evaluation need besides it."""

    graph: SupervoxelGraph
    mask: np.ndarray  # (n_voxels,) bool, x-fastest
    pe: np.ndarray  # (n_nodes, pe_dim) canonical-sign positional encoding

    @property
    def case_id(self) -> str:
        return self.graph.case_id


@dataclass
class ClientState:
    client_id: ClientId
    train: list[CaseData]
    test: list[CaseData]
    params: ParamStore
    optimizer: AdamWState = field(default_factory=AdamWState)

    def __post_init__(self) -> None:
        if not self.train:
            raise ValueError(f"client {self.client_id} has no training graphs")

    @property
    def n_samples(self) -> int:
        return len(self.train)


@dataclass(frozen=True)
class EvalMetrics:
    loss: float
    dice: float
    precision: float
    recall: float
    f1: float
    n_cases: int


@dataclass(frozen=True)
class RoundReport:
    paradigm: str
    client: str  # "global" for the aggregate row, else the client id
    round: int
    loss: float
    dice: float
    precision: float
    recall: float
    f1: float
    lr: float
    bytes_fp32: int = 0
    bytes_half: int = 0
    wall_time_s: float = 0.0

    def as_row(self) -> dict:
        return {
            "paradigm": self.paradigm,
            "client": self.client,
            "round": self.round,
            "loss": self.loss,
            "dice": self.dice,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "lr": self.lr,
            "bytes_fp32": self.bytes_fp32,
            "bytes_half": self.bytes_half,
            "wall_time_s": self.wall_time_s,
        }


ROUND_COLUMNS = tuple(RoundReport.__dataclass_fields__)


@dataclass
class EarlyStopper:
    """Stops once the monitored metric has not improved for more than ``patience`` rounds."""

    patience: int
    best_metric: float = float("-inf")
    best_round: int = -1
    best_params: Optional[ParamStore] = None

    def update(self, round_index: int, metric: float, params: ParamStore) -> bool:
        """Records one evaluation; returns True when training should stop."""
        if metric > self.best_metric:
            self.best_metric = metric
            self.best_round = round_index
            self.best_params = params
        return self.should_stop(round_index)

    def should_stop(self, round_index: int) -> bool:
        return self.best_round >= 0 and (round_index - self.best_round) > self.patience
