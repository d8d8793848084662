from __future__ import annotations

from typing import Sequence

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError, SpecValidationError
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore


def fedavg_weights(counts: Sequence[int]) -> np.ndarray:
    n = np.asarray(counts, dtype=np.float64)
    if n.size == 0:
        raise SpecValidationError("n", "no client counts")
    if np.any(n <= 0):
        raise SpecValidationError("n", "every client count must be positive")
    return n / n.sum()


def fedavg_aggregate(params: Sequence[ParamStore], counts: Sequence[int]) -> ParamStore:
    """Sample-count weighted mean of client stores, accumulated in client order.

    Computed as ``w_0 + sum_k (n_k / N) (w_k - w_0)`` in float64, which equals
    the weighted mean and returns identical inputs unchanged bit for bit.
    """
    if not params:
        raise SpecValidationError("params", "no client parameter stores")
    if len(params) != len(counts):
        raise SpecValidationError("n", f"{len(counts)} counts for {len(params)} stores")
    weights = fedavg_weights(counts)
    anchor = params[0]
    for store in params[1:]:
        if store.names != anchor.names or store.shapes != anchor.shapes:
            raise ShapeMismatchError("client parameter stores differ in names or shapes")
    base = anchor.flatten().astype(np.float64)
    total = np.zeros_like(base)
    for weight, store in zip(weights, params):
        total += weight * (store.flatten().astype(np.float64) - base)
    return anchor.unflatten((base + total).astype(anchor.dtype))
