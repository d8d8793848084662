"""One round of local training on a client.

Random draws of a round come from a single generator, in this order: the
batch order permutation(s), then per graph the positional-encoding sign flips
followed by the classifier dropout masks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from fedsvg_runtime.domain.common.errors import NonFiniteLossError
from fedsvg_runtime.domain.common.rng import SALT_CLIENT, substream
from fedsvg_runtime.domain.federation.config import TrainingConfig
from fedsvg_runtime.domain.federation.models import ClientState
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.model.network import loss_and_grads
from fedsvg_runtime.domain.tensor_autodiff.optim import adamw_step, clip_grad_norm, cosine_warm_restart_lr
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpochMetrics:
    mean_loss: float
    n_graphs: int
    n_steps: int
    lr: float
    grad_norm: float


def round_generator(seed: int, client_index: int, round_index: int) -> np.random.Generator:
    return substream(seed, client_index, round_index, salt=SALT_CLIENT)


def batch_order(n_train: int, training: TrainingConfig, rng: np.random.Generator) -> np.ndarray:
    if training.local_strategy == "epoch":
        return rng.permutation(n_train)
    needed = training.local_steps * training.batch_size
    chunks = []
    while sum(len(c) for c in chunks) < needed:
        chunks.append(rng.permutation(n_train))
    return np.concatenate(chunks)[:needed]


def _mean(grads: Mapping[str, np.ndarray], count: int) -> dict[str, np.ndarray]:
    return {name: g / count for name, g in grads.items()}


def local_train_epoch(
    client: ClientState,
    global_params: ParamStore,
    training: TrainingConfig,
    model: ModelConfig,
    round_index: int,
    seed: int,
    client_index: Optional[int] = None,
) -> tuple[ParamStore, EpochMetrics]:
    """Train ``client`` from ``global_params`` for one round and return the new parameters.

    Batches of ``batch_size`` graphs; gradients are averaged over
    ``accumulation_steps`` batches per optimizer step, clipped, then applied
    with AdamW at the round's cosine-restart learning rate. The client's
    optimizer state carries over between rounds.
    """
    index = int(client.client_id) if client_index is None else client_index
    rng = round_generator(seed, index, round_index)
    lr = cosine_warm_restart_lr(round_index, training.lr, training.t0, training.t_mult)
    order = batch_order(client.n_samples, training, rng)

    params = global_params
    state = client.optimizer
    pending: Optional[dict[str, np.ndarray]] = None
    pending_graphs = pending_batches = steps = 0
    losses: list[float] = []
    norm = 0.0
    batch_starts = list(range(0, len(order), training.batch_size))
    for b, start in enumerate(batch_starts):
        for idx in order[start : start + training.batch_size]:
            case = client.train[int(idx)]
            pe = case.pe * rng.choice(np.array([-1.0, 1.0]), size=case.pe.shape[1])
            components, grads = loss_and_grads(params, case.graph, pe, model, rng, training=True)
            if not np.isfinite(components.total):
                raise NonFiniteLossError(
                    f"non-finite loss on client {index} round {round_index} case {case.case_id}",
                    context={
                        "client": index,
                        "round": round_index,
                        "case_id": case.case_id,
                        "focal": components.focal,
                        "dice": components.dice,
                        "recall": components.recall,
                    },
                )
            pending = grads if pending is None else {n: pending[n] + grads[n] for n in pending}
            pending_graphs += 1
            losses.append(components.total)
        pending_batches += 1
        if pending_batches == training.accumulation_steps or b == len(batch_starts) - 1:
            clipped, norm = clip_grad_norm(_mean(pending, pending_graphs), training.clip_norm)
            params, state = adamw_step(
                params,
                clipped,
                state,
                lr,
                beta1=training.beta1,
                beta2=training.beta2,
                eps=training.eps,
                weight_decay=training.weight_decay,
            )
            steps += 1
            pending, pending_graphs, pending_batches = None, 0, 0

    client.params = params
    client.optimizer = state
    metrics = EpochMetrics(
        mean_loss=float(np.mean(losses)),
        n_graphs=len(losses),
        n_steps=steps,
        lr=lr,
        grad_norm=norm,
    )
    logger.debug(
        "client=%d round=%d loss=%.5f steps=%d lr=%.3g", index, round_index, metrics.mean_loss, steps, lr
    )
    return params, metrics
