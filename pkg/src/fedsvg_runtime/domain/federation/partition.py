from __future__ import annotations

import logging
import math
from typing import Sequence

from fedsvg_runtime.domain.common.errors import SpecValidationError
from fedsvg_runtime.domain.common.ids import ClientId
from fedsvg_runtime.domain.common.rng import SALT_PARTITION, substream
from fedsvg_runtime.domain.federation.models import ClientSplit, PartitionPlan

logger = logging.getLogger(__name__)


def client_sizes(n_cases: int, fractions: Sequence[float]) -> list[int]:
    """round(fraction * N) per client (half up), remainder to the last client."""
    sizes = [int(math.floor(f * n_cases + 0.5)) for f in fractions[:-1]]
    sizes.append(n_cases - sum(sizes))
    for client, size in enumerate(sizes):
        if size < 1:
            raise SpecValidationError(
                "fractions", f"client {client} would receive {size} of {n_cases} cases"
            )
    return sizes


def _train_count(n: int, train_fraction: float) -> int:
    n_train = max(1, int(math.floor(train_fraction * n + 0.5)))
    # keep at least one test case whenever the client has two or more cases
    if n >= 2 and train_fraction < 1.0:
        n_train = min(n_train, n - 1)
    return n_train


def partition_dataset(cases: Sequence[str], plan: PartitionPlan, seed: int) -> list[ClientSplit]:
    """Shuffle, slice into contiguous client blocks, then split each block train/test.

    One generator drives the whole partition: the case shuffle first, then the
    per-client shuffles in client order.
    """
    if len(cases) < plan.n_clients:
        raise SpecValidationError("cases", f"{len(cases)} cases for {plan.n_clients} clients")
    sizes = client_sizes(len(cases), plan.fractions)
    rng = substream(seed, salt=SALT_PARTITION)
    shuffled = [cases[i] for i in rng.permutation(len(cases))]
    splits: list[ClientSplit] = []
    start = 0
    for client, size in enumerate(sizes):
        block = shuffled[start : start + size]
        start += size
        order = rng.permutation(size)
        n_train = _train_count(size, plan.train_fraction)
        splits.append(
            ClientSplit(
                client_id=ClientId(client),
                train=tuple(block[i] for i in order[:n_train]),
                test=tuple(block[i] for i in order[n_train:]),
            )
        )
        logger.info("client=%d cases=%d train=%d test=%d", client, size, n_train, size - n_train)
    return splits
