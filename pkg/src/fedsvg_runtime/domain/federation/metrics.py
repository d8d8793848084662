from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fedsvg_runtime.domain.federation.models import CaseData, EvalMetrics
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.model.network import evaluation_loss, predict
from fedsvg_runtime.domain.supervoxel_graph.model import SupervoxelGraph
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore


@dataclass(frozen=True)
class NodeCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "NodeCounts") -> "NodeCounts":
        return NodeCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @classmethod
    def of(cls, predicted: np.ndarray, labels: np.ndarray) -> "NodeCounts":
        p = np.asarray(predicted, dtype=bool)
        y = np.asarray(labels, dtype=bool)
        return cls(int(np.sum(p & y)), int(np.sum(p & ~y)), int(np.sum(~p & y)))

    @property
    def precision(self) -> float:
        if self.tp + self.fp == 0:
            return 1.0 if self.fn == 0 else 0.0
        return self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float:
        if self.tp + self.fn == 0:
            return 1.0
        return self.tp / (self.tp + self.fn)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def dice_score(predicted: np.ndarray, truth: np.ndarray) -> float:
    """2|P∩G| / (|P|+|G|) over boolean voxel masks; 1 when both are empty."""
    p = np.asarray(predicted, dtype=bool)
    g = np.asarray(truth, dtype=bool)
    denominator = int(p.sum()) + int(g.sum())
    if denominator == 0:
        return 1.0
    return 2.0 * int(np.sum(p & g)) / denominator


def predicted_voxels(graph: SupervoxelGraph, positive: np.ndarray) -> np.ndarray:
    """Boolean voxel mask of the union of positive-predicted supervoxels."""
    mask = np.zeros(int(np.prod(graph.dims)), dtype=bool)
    for node in np.flatnonzero(positive):
        mask[graph.voxels_of(int(node))] = True
    return mask


def voxel_dice(graph: SupervoxelGraph, positive: np.ndarray, truth: np.ndarray) -> float:
    return dice_score(predicted_voxels(graph, positive), truth)


@dataclass(frozen=True)
class CaseEvaluation:
    case_id: str
    counts: NodeCounts
    dice: float
    loss: float


def evaluate_cases(
    params: ParamStore, cases: Sequence[CaseData], config: ModelConfig
) -> list[CaseEvaluation]:
    results = []
    for case in cases:
        output = predict(params, case.graph, case.pe, config)
        positive = output.predictions()
        results.append(
            CaseEvaluation(
                case_id=case.case_id,
                counts=NodeCounts.of(positive, case.graph.labels),
                dice=voxel_dice(case.graph, positive, case.mask),
                loss=evaluation_loss(output.logits, case.graph.labels, config).total,
            )
        )
    return results


def summarize(evaluations: Sequence[CaseEvaluation]) -> EvalMetrics:
    """Node metrics pooled over all graphs; voxel Dice and loss averaged per case."""
    if not evaluations:
        return EvalMetrics(loss=0.0, dice=0.0, precision=0.0, recall=0.0, f1=0.0, n_cases=0)
    counts = NodeCounts()
    for evaluation in evaluations:
        counts = counts + evaluation.counts
    return EvalMetrics(
        loss=float(np.mean([e.loss for e in evaluations])),
        dice=float(np.mean([e.dice for e in evaluations])),
        precision=counts.precision,
        recall=counts.recall,
        f1=counts.f1,
        n_cases=len(evaluations),
    )


def eval_metrics(params: ParamStore, cases: Sequence[CaseData], config: ModelConfig) -> EvalMetrics:
    return summarize(evaluate_cases(params, cases, config))
