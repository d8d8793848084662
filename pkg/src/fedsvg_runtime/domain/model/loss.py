"""Compound node loss: focal + soft Dice + recall term."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fedsvg_runtime.domain.common.errors import SpecValidationError
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.tensor_autodiff import ops
from fedsvg_runtime.domain.tensor_autodiff.tensor import Tensor


@dataclass(frozen=True)
class LossWeights:
    focal: float = 1.0
    dice: float = 1.0
    recall: float = 1.0
    alpha: float = 0.75
    gamma: float = 2.0
    epsilon: float = 1e-6

    @classmethod
    def from_config(cls, config: ModelConfig) -> "LossWeights":
        return cls(
            focal=config.lambda_focal,
            dice=config.lambda_dice,
            recall=config.lambda_recall,
            alpha=config.focal_alpha,
            gamma=config.focal_gamma,
            epsilon=config.epsilon,
        )


@dataclass(frozen=True)
class LossComponents:
    total: float
    focal: float
    dice: float
    recall: float


def compound_loss(logits: Tensor, labels: np.ndarray, weights: LossWeights) -> tuple[Tensor, LossComponents]:
    """Returns the differentiable total and the float value of every component."""
    y = np.asarray(labels, dtype=logits.data.dtype).reshape(-1)
    if y.size == 0:
        raise SpecValidationError("labels", "empty input")
    if logits.data.size != y.size:
        raise SpecValidationError("labels", f"{y.size} labels for {logits.data.size} logits")
    z = ops.reshape(logits, (y.size,))
    p = ops.sigmoid(z)
    log_pt = ops.add(ops.mul(ops.log_sigmoid(z), y), ops.mul(ops.log_sigmoid(ops.mul(z, -1.0)), 1.0 - y))
    p_t = ops.add(ops.mul(p, y), ops.mul(ops.sub(1.0, p), 1.0 - y))
    alpha_t = weights.alpha * y + (1.0 - weights.alpha) * (1.0 - y)
    modulator = ops.power(ops.sub(1.0, p_t), weights.gamma)
    focal = ops.mean(ops.mul(ops.mul(modulator, log_pt), -alpha_t))

    eps = weights.epsilon
    overlap = ops.sum(ops.mul(p, y))
    dice = ops.sub(1.0, ops.div(ops.add(ops.mul(overlap, 2.0), eps), ops.add(ops.sum(p), float(y.sum()) + eps)))
    recall = ops.sub(1.0, ops.div(ops.add(overlap, eps), float(y.sum()) + eps))

    total = ops.add(
        ops.add(ops.mul(focal, weights.focal), ops.mul(dice, weights.dice)),
        ops.mul(recall, weights.recall),
    )
    components = LossComponents(
        total=float(total.data),
        focal=float(focal.data),
        dice=float(dice.data),
        recall=float(recall.data),
    )
    return total, components
