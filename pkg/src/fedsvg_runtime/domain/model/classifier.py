from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from fedsvg_runtime.domain.tensor_autodiff import ops
from fedsvg_runtime.domain.tensor_autodiff.tensor import Tensor


def classifier_forward(
    f: Tensor,
    params: Mapping[str, Tensor],
    dropout: float,
    training: bool,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    """Three-layer MLP d -> d -> d/2 -> 1 with GELU and dropout; returns (N, 1) logits."""
    if training and dropout > 0 and rng is None:
        raise ValueError("training-mode dropout needs a generator")
    h = ops.gelu(ops.linear(f, params["cls.fc1.w"], params["cls.fc1.b"]))
    h = ops.dropout(h, dropout, rng, training)
    h = ops.gelu(ops.linear(h, params["cls.fc2.w"], params["cls.fc2.b"]))
    h = ops.dropout(h, dropout, rng, training)
    return ops.linear(h, params["cls.fc3.w"], params["cls.fc3.b"])
