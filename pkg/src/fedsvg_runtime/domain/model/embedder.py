"""Node Embedder: a patch Transformer with CLS token and modality embeddings.

Tokens of one node are its 4·P patches, modality-major (P consecutive patches
per modality, in T1, T1ce, T2, FLAIR order), preceded by the CLS token. There
is no positional embedding, so the output is invariant to patch order within a
modality block.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.model.init import N_MODALITIES
from fedsvg_runtime.domain.tensor_autodiff import ops
from fedsvg_runtime.domain.tensor_autodiff.tensor import Tensor


def modality_ids(n_tokens: int) -> np.ndarray:
    if n_tokens % N_MODALITIES:
        raise ShapeMismatchError(f"{n_tokens} patch rows do not split into {N_MODALITIES} modality blocks")
    return np.repeat(np.arange(N_MODALITIES), n_tokens // N_MODALITIES)


def _split_heads(x: Tensor, n_heads: int) -> Tensor:
    n, t, d = x.shape
    return ops.transpose(ops.reshape(x, (n, t, n_heads, d // n_heads)), (0, 2, 1, 3))


def _merge_heads(x: Tensor) -> Tensor:
    n, h, t, dh = x.shape
    return ops.reshape(ops.transpose(x, (0, 2, 1, 3)), (n, t, h * dh))


def self_attention(
    x: Tensor, params: Mapping[str, Tensor], prefix: str, n_heads: int
) -> tuple[Tensor, np.ndarray]:
    """Multi-head self-attention; also returns the CLS rows, shape (N, H, T+1)."""
    q = _split_heads(ops.linear(x, params[prefix + "wq"], params[prefix + "bq"]), n_heads)
    k = _split_heads(ops.linear(x, params[prefix + "wk"], params[prefix + "bk"]), n_heads)
    v = _split_heads(ops.linear(x, params[prefix + "wv"], params[prefix + "bv"]), n_heads)
    scale = 1.0 / math.sqrt(q.shape[-1])
    scores = ops.mul(ops.matmul(q, ops.transpose(k, (0, 1, 3, 2))), scale)
    weights = ops.softmax(scores, axis=-1)
    context = _merge_heads(ops.matmul(weights, v))
    out = ops.linear(context, params[prefix + "wo"], params[prefix + "bo"])
    return out, weights.data[:, :, 0, :].copy()


def node_embedder_forward(
    patches: np.ndarray,
    params: Mapping[str, Tensor],
    config: ModelConfig,
    capture_attention: bool = False,
) -> tuple[Tensor, Optional[np.ndarray]]:
    """Embed ``patches`` (N, 4P, F) into node features (N, d).

    With ``capture_attention`` the CLS attention rows of every layer and head
    are returned as an array of shape (N, layers, heads, 4P+1).
    """
    if patches.ndim != 3:
        raise ShapeMismatchError(f"patch tensor must be 3-D, got shape {patches.shape}")
    n, n_tokens, n_features = patches.shape
    expected = params["emb.patch.w"].shape[0]
    if n_features != expected:
        raise ShapeMismatchError(f"patch features {n_features} != embedder input width {expected}")
    d = config.d_model
    tape = params["emb.patch.w"].tape
    x = ops.as_tensor(np.asarray(patches), tape, params["emb.patch.w"].data.dtype)
    h = ops.linear(x, params["emb.patch.w"], params["emb.patch.b"])
    h = ops.embedding_add(h, params["emb.modality"], modality_ids(n_tokens))
    zeros = ops.as_tensor(np.zeros((n, 1, d), dtype=h.data.dtype), tape)
    cls = ops.add(zeros, ops.reshape(params["emb.cls"], (1, 1, d)))
    x = ops.concat([cls, h], axis=1)

    captured = []
    for layer in range(config.n_embedder_layers):
        p = f"emb.block{layer}."
        attended, cls_rows = self_attention(
            ops.layer_norm(x, params[p + "ln1.g"], params[p + "ln1.b"]), params, p + "attn.", config.n_heads
        )
        if capture_attention:
            captured.append(cls_rows)
        x = ops.add(x, attended)
        normed = ops.layer_norm(x, params[p + "ln2.g"], params[p + "ln2.b"])
        hidden = ops.gelu(ops.linear(normed, params[p + "ffn.w1"], params[p + "ffn.b1"]))
        x = ops.add(x, ops.linear(hidden, params[p + "ffn.w2"], params[p + "ffn.b2"]))

    x = ops.layer_norm(x, params["emb.ln_out.g"], params["emb.ln_out.b"])
    cls_out = ops.index(x, (slice(None), 0, slice(None)))
    pooled = ops.mean(ops.index(x, (slice(None), slice(1, None), slice(None))), axis=1)
    feats = ops.linear(ops.concat([cls_out, pooled], axis=-1), params["emb.out.w"], params["emb.out.b"])
    attention = np.stack(captured, axis=1) if capture_attention else None
    return feats, attention
