"""GATv2 message passing over an edge list.

``edges`` rows are messages ``(src, dst)``: node ``dst`` attends to ``src``.
Every node also attends to itself, so no attention neighbourhood is empty.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError
from fedsvg_runtime.domain.tensor_autodiff import ops
from fedsvg_runtime.domain.tensor_autodiff.tensor import Tensor

LEAKY_SLOPE = 0.2


def with_self_loops(edges: np.ndarray, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= n_nodes):
        raise ShapeMismatchError(f"edge endpoint outside [0, {n_nodes})")
    loops = np.arange(n_nodes, dtype=np.int64)
    return np.concatenate([edges[:, 0], loops]), np.concatenate([edges[:, 1], loops])


def gatv2_layer_forward(
    h: Tensor,
    edges: np.ndarray,
    params: Mapping[str, Tensor],
    prefix: str,
    n_heads: int,
) -> tuple[Tensor, Tensor]:
    """One GATv2 layer; returns the (N, d) output and the (E+N, H) attention weights.

    e_ij = a_h . LeakyReLU(W [h_i || h_j]) for every message j -> i and self-loop,
    normalised by a softmax over i's neighbourhood; head outputs are
    sum_j alpha_ij W_v h_j, concatenated and mixed by one linear map.
    """
    n, d = h.shape
    src, dst = with_self_loops(edges, n)
    w = params[prefix + "w"]
    target_part = ops.matmul(h, ops.index(w, slice(0, d)))
    source_part = ops.matmul(h, ops.index(w, slice(d, 2 * d)))
    hidden = ops.leaky_relu(ops.add(ops.gather(target_part, dst), ops.gather(source_part, src)), LEAKY_SLOPE)
    head_dim = d // n_heads
    hidden = ops.reshape(hidden, (len(src), n_heads, head_dim))
    scores = ops.sum(ops.mul(hidden, params[prefix + "att"]), axis=-1)
    alpha = ops.segment_softmax(scores, dst, n)

    values = ops.reshape(ops.gather(ops.matmul(h, params[prefix + "wv"]), src), (len(src), n_heads, head_dim))
    messages = ops.mul(values, ops.reshape(alpha, (len(src), n_heads, 1)))
    heads = ops.reshape(ops.segment_sum(messages, dst, n), (n, d))
    out = ops.linear(heads, params[prefix + "mix.w"], params[prefix + "mix.b"])
    return out, alpha
