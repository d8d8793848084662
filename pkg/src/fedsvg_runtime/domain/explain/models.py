from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from fedsvg_runtime.domain.volume_forge.config import MODALITIES

HIGH_CONTRAST = ("T2", "FLAIR")
LOW_CONTRAST = ("T1", "T1ce")


@dataclass(frozen=True, eq=False)
class ModalityAttention:
    """Node-averaged modality attention of one case, shape (layers, 4) in MODALITIES order."""

    case_id: str
    values: np.ndarray

    @property
    def n_layers(self) -> int:
        return int(self.values.shape[0])

    def at(self, layer: int, modality: str) -> float:
        return float(self.values[layer, MODALITIES.index(modality)])

    def delta(self, layer: int) -> float:
        """mean(T2, FLAIR) - mean(T1, T1ce) at ``layer``."""
        high = np.mean([self.at(layer, m) for m in HIGH_CONTRAST])
        low = np.mean([self.at(layer, m) for m in LOW_CONTRAST])
        return float(high - low)


class _Report(BaseModel):
    model_config = ConfigDict(frozen=True)


class AnovaEntry(_Report):
    layer: int
    f: Optional[float]  # None when the statistic is infinite
    p: float
    df_between: int
    df_within: int


class ContrastEntry(_Report):
    layer: int
    first: str
    second: str
    mean_difference: Optional[float]
    t: Optional[float]
    df: Optional[int]
    p: Optional[float]
    p_bonferroni: Optional[float]
    bonferroni_m: int
    cohens_d: Optional[float]
    note: Optional[str] = None


class ModalitySummary(_Report):
    layer: int
    modality: str
    mean: float
    sd: float


class TrendEntry(_Report):
    first_layer: int
    last_layer: int
    mean_difference: Optional[float]
    t: Optional[float]
    df: Optional[int]
    p: Optional[float]
    cohens_d: Optional[float]
    note: Optional[str] = None


class CorrelationEntry(_Report):
    per_case: dict[str, float]
    excluded: list[str]
    mean_r: Optional[float]
    t: Optional[float]
    p: Optional[float]


class StatReport(_Report):
    n_cases: int
    n_layers: int
    modalities: list[str]
    summary: list[ModalitySummary]
    anova: list[AnovaEntry]
    group_contrast: list[ContrastEntry]
    pairwise: list[ContrastEntry]
    trend: TrendEntry
    correlation: CorrelationEntry
