from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class TrainingConfig(BaseModel):
    """Schedule and optimizer constants shared by all three paradigms.

    Desk defaults are the full-size schedule (600 rounds, 200 epochs, patience
    100, restart period 100) scaled down by ten.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    rounds: int = Field(default=60, ge=1)
    epochs: int = Field(default=60, ge=1)
    patience: int = Field(default=15, ge=0)
    lr: float = Field(default=1e-3, ge=0.0)
    t0: int = Field(default=10, ge=1)
    t_mult: int = Field(default=2, ge=1)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)
    weight_decay: float = Field(default=1e-2, ge=0.0)
    clip_norm: float = Field(default=1.0, gt=0.0)
    batch_size: int = Field(default=2, ge=1)
    accumulation_steps: int = Field(default=8, ge=1)
    eval_every: int = Field(default=1, ge=1)
    # "epoch": one pass over the local data per round; "steps": a fixed number of batches
    local_strategy: Literal["epoch", "steps"] = "epoch"
    local_steps: int = Field(default=8, ge=1)
    deterministic_outputs: bool = True
