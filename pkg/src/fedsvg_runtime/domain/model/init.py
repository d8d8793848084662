"""Parameter declaration and initialisation.

Parameter names and their order are part of the checkpoint contract: the order
below is the iteration order of every ``ParamStore`` the model produces and the
order FedAvg flattens in.
"""

from __future__ import annotations

import numpy as np

from fedsvg_runtime.domain.common.rng import SALT_INIT, substream
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore

EMBEDDER_PREFIX = "emb."
N_MODALITIES = 4


def parameter_shapes(config: ModelConfig, patch_features: int) -> dict[str, tuple[int, ...]]:
    d = config.d_model
    ffn = config.ffn_mult * d
    shapes: dict[str, tuple[int, ...]] = {
        "emb.patch.w": (patch_features, d),
        "emb.patch.b": (d,),
        "emb.modality": (N_MODALITIES, d),
        "emb.cls": (1, d),
    }
    for layer in range(config.n_embedder_layers):
        p = f"emb.block{layer}."
        shapes.update(
            {
                p + "ln1.g": (d,),
                p + "ln1.b": (d,),
                p + "attn.wq": (d, d),
                p + "attn.bq": (d,),
                p + "attn.wk": (d, d),
                p + "attn.bk": (d,),
                p + "attn.wv": (d, d),
                p + "attn.bv": (d,),
                p + "attn.wo": (d, d),
                p + "attn.bo": (d,),
                p + "ln2.g": (d,),
                p + "ln2.b": (d,),
                p + "ffn.w1": (d, ffn),
                p + "ffn.b1": (ffn,),
                p + "ffn.w2": (ffn, d),
                p + "ffn.b2": (d,),
            }
        )
    shapes.update(
        {
            "emb.ln_out.g": (d,),
            "emb.ln_out.b": (d,),
            "emb.out.w": (2 * d, d),
            "emb.out.b": (d,),
            "gnn.in.w": (d + config.pe_dim, d),
            "gnn.in.b": (d,),
        }
    )
    for layer in range(config.n_gnn_layers):
        p = f"gnn.layer{layer}."
        shapes.update(
            {
                p + "w": (2 * d, d),
                p + "att": (config.n_heads, config.head_dim),
                p + "wv": (d, d),
                p + "mix.w": (d, d),
                p + "mix.b": (d,),
                p + "ln.g": (d,),
                p + "ln.b": (d,),
            }
        )
    shapes.update(
        {
            "gnn.fuse.w": (config.n_gnn_layers * d, d),
            "gnn.fuse_ln.g": (d,),
            "gnn.fuse_ln.b": (d,),
            "cls.fc1.w": (d, d),
            "cls.fc1.b": (d,),
            "cls.fc2.w": (d, d // 2),
            "cls.fc2.b": (d // 2,),
            "cls.fc3.w": (d // 2, 1),
            "cls.fc3.b": (1,),
        }
    )
    return shapes


def _initial_value(name: str, shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    leaf = name.rsplit(".", 1)[-1]
    if leaf == "g":
        return np.ones(shape)
    if len(shape) == 1:
        return np.zeros(shape)
    if name in ("emb.modality", "emb.cls"):
        return rng.normal(0.0, 0.02, size=shape)
    fan_in, fan_out = shape[0], shape[-1]
    if leaf == "att":
        fan_in = fan_out = shape[-1]
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def init_params(config: ModelConfig, patch_features: int, seed: int, dtype=np.float32) -> ParamStore:
    """Glorot-uniform weights, zero biases, unit LayerNorm gains, N(0, 0.02) embeddings."""
    rng = substream(seed, salt=SALT_INIT)
    values = {
        name: _initial_value(name, shape, rng) for name, shape in parameter_shapes(config, patch_features).items()
    }
    return ParamStore(values, dtype=dtype)


def parameter_count(config: ModelConfig, patch_features: int) -> int:
    return int(sum(np.prod(shape) for shape in parameter_shapes(config, patch_features).values()))
