from __future__ import annotations

from typing import Mapping

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.model.gatv2 import gatv2_layer_forward
from fedsvg_runtime.domain.tensor_autodiff import ops
from fedsvg_runtime.domain.tensor_autodiff.tensor import Tensor


def message_edges(knn_edges: np.ndarray) -> np.ndarray:
    """Stored rows ``(i, j)`` (j among i's nearest) as messages j -> i."""
    return np.asarray(knn_edges, dtype=np.int64).reshape(-1, 2)[:, ::-1]


def graph_encoder_forward(
    node_feats: Tensor,
    pe: np.ndarray,
    knn_edges: np.ndarray,
    params: Mapping[str, Tensor],
    config: ModelConfig,
) -> tuple[Tensor, list[Tensor]]:
    """Input projection, residual GATv2 layers with LayerNorm, then multi-scale fusion.

    Returns the fused (N, d) features and the per-layer outputs e^(1..L);
    fusion is ``LayerNorm(W_fuse [e^(1) || ... || e^(L)])``.
    """
    n = node_feats.shape[0]
    if pe.shape != (n, config.pe_dim):
        raise ShapeMismatchError(f"positional encoding shape {pe.shape} != ({n}, {config.pe_dim})")
    pe_t = ops.as_tensor(np.asarray(pe), node_feats.tape, node_feats.data.dtype)
    x = ops.linear(ops.concat([node_feats, pe_t], axis=-1), params["gnn.in.w"], params["gnn.in.b"])
    messages = message_edges(knn_edges)
    layer_outputs: list[Tensor] = []
    for layer in range(config.n_gnn_layers):
        p = f"gnn.layer{layer}."
        attended, _ = gatv2_layer_forward(x, messages, params, p, config.n_heads)
        x = ops.layer_norm(ops.add(x, attended), params[p + "ln.g"], params[p + "ln.b"])
        layer_outputs.append(x)
    fused = ops.layer_norm(
        ops.matmul(ops.concat(layer_outputs, axis=-1), params["gnn.fuse.w"]),
        params["gnn.fuse_ln.g"],
        params["gnn.fuse_ln.b"],
    )
    return fused, layer_outputs
