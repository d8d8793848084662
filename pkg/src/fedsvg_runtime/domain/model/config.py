from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelConfig(BaseModel):
    """Transformer-GNN dimensions and loss weights.

    The full-size network uses d_model=192 and pe_dim=16; the defaults are the
    desk-scale values.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    d_model: int = Field(default=48, ge=2)
    n_heads: int = Field(default=6, ge=1)
    n_embedder_layers: int = Field(default=3, ge=1)
    n_gnn_layers: int = Field(default=3, ge=1)
    pe_dim: int = Field(default=8, ge=1)
    ffn_mult: int = Field(default=4, ge=1)
    dropout: float = Field(default=0.2, ge=0.0, lt=1.0)
    focal_alpha: float = Field(default=0.75, ge=0.0, le=1.0)
    focal_gamma: float = Field(default=2.0, ge=0.0)
    lambda_focal: float = Field(default=1.0, ge=0.0)
    lambda_dice: float = Field(default=1.0, ge=0.0)
    lambda_recall: float = Field(default=1.0, ge=0.0)
    epsilon: float = Field(default=1e-6, gt=0.0)
    # nodes per embedder recompute chunk during backward
    node_chunk: int = Field(default=16, ge=1)

    @model_validator(mode="after")
    def _check_heads(self) -> "ModelConfig":
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model ({self.d_model}) must be divisible by n_heads ({self.n_heads})")
        if self.d_model % 2:
            raise ValueError(f"d_model ({self.d_model}) must be even for the d/2 classifier layer")
        return self

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads
