"""AdamW, cosine warm restarts and global-norm clipping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore


@dataclass
class AdamWState:
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adamw_step(
    params: ParamStore,
    grads: Mapping[str, np.ndarray],
    state: AdamWState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 1e-2,
) -> tuple[ParamStore, AdamWState]:
    """One AdamW update.

    Weight decay is decoupled: ``p <- p - lr * wd * p`` is applied first, then
    the bias-corrected Adam step.
    """
    params.check_compatible(grads)
    step = state.step + 1
    dtype = params.dtype
    correction1 = 1.0 - beta1**step
    correction2 = 1.0 - beta2**step
    new_values: dict[str, np.ndarray] = {}
    new_m: dict[str, np.ndarray] = {}
    new_v: dict[str, np.ndarray] = {}
    for name in params:
        p = params[name]
        g = np.asarray(grads[name], dtype=dtype)
        m = state.m.get(name, np.zeros_like(p))
        v = state.v.get(name, np.zeros_like(p))
        if m.shape != p.shape:
            raise ShapeMismatchError(f"optimizer state for {name} has shape {m.shape}")
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        decayed = p - lr * weight_decay * p
        update = (m / correction1) / (np.sqrt(v / correction2) + eps)
        new_values[name] = (decayed - lr * update).astype(dtype)
        new_m[name] = m.astype(dtype)
        new_v[name] = v.astype(dtype)
    return ParamStore(new_values, dtype=dtype), AdamWState(step=step, m=new_m, v=new_v)


def cosine_warm_restart_lr(step: int, base_lr: float, t0: int, t_mult: int = 2, eta_min: float = 0.0) -> float:
    """Cosine-annealed learning rate that restarts after periods t0, t0*t_mult, ..."""
    if t0 < 1 or t_mult < 1:
        raise ValueError("t0 and t_mult must be >= 1")
    t = int(step)
    period = int(t0)
    while t >= period:
        t -= period
        period *= t_mult
    return eta_min + 0.5 * (base_lr - eta_min) * (1.0 + math.cos(math.pi * t / period))


def global_norm(grads: Mapping[str, np.ndarray]) -> float:
    return math.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in grads.values()))


def clip_grad_norm(grads: Mapping[str, np.ndarray], max_norm: float = 1.0) -> tuple[dict[str, np.ndarray], float]:
    """Scale gradients so their global L2 norm is at most ``max_norm``; returns the pre-clip norm."""
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0.0:
        return dict(grads), norm
    scale = max_norm / norm
    return {name: (g * scale).astype(g.dtype) for name, g in grads.items()}, norm
