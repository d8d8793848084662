"""Full Transformer-GNN forward and gradient computation for one graph.

Backward through the Node Embedder is done in node chunks: the embedder runs
once without a tape, the graph encoder and classifier are differentiated with
the node features as a leaf, and each chunk of nodes is then re-embedded on a
fresh tape and differentiated against its slice of the upstream gradient.
Dropout lives only in the classifier, so the recompute reproduces the first
pass exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from fedsvg_runtime.domain.model.attention import CaseAttention
from fedsvg_runtime.domain.model.classifier import classifier_forward
from fedsvg_runtime.domain.model.config import ModelConfig
from fedsvg_runtime.domain.model.embedder import node_embedder_forward
from fedsvg_runtime.domain.model.graph_encoder import graph_encoder_forward
from fedsvg_runtime.domain.model.init import EMBEDDER_PREFIX
from fedsvg_runtime.domain.model.loss import LossComponents, LossWeights, compound_loss
from fedsvg_runtime.domain.supervoxel_graph.model import SupervoxelGraph
from fedsvg_runtime.domain.tensor_autodiff import ops
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore
from fedsvg_runtime.domain.tensor_autodiff.tensor import Tape, Tensor, backward

logger = logging.getLogger(__name__)

NODE_FEATS = "__node_feats__"


@dataclass(frozen=True, eq=False)
class ForwardOutput:
    logits: np.ndarray  # (N,)
    attention: Optional[CaseAttention] = None

    def probabilities(self) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-self.logits.astype(np.float64)))

    def predictions(self) -> np.ndarray:
        return (self.logits >= 0).astype(np.uint8)


def _subset(params: ParamStore, tape: Optional[Tape], embedder: bool) -> dict[str, Tensor]:
    names = [n for n in params if n.startswith(EMBEDDER_PREFIX) == embedder]
    if tape is None:
        return {n: Tensor(params[n]) for n in names}
    return {n: tape.leaf(n, params[n]) for n in names}


def embed_nodes(
    params: ParamStore, patches: np.ndarray, config: ModelConfig, capture_attention: bool = False
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Untracked embedder pass in chunks of ``config.node_chunk`` nodes."""
    weights = _subset(params, None, embedder=True)
    feats, captured = [], []
    for start in range(0, patches.shape[0], config.node_chunk):
        out, attention = node_embedder_forward(
            patches[start : start + config.node_chunk], weights, config, capture_attention
        )
        feats.append(out.data)
        if attention is not None:
            captured.append(attention)
    if not feats:
        return np.zeros((0, config.d_model), dtype=params.dtype), None
    return np.concatenate(feats), (np.concatenate(captured) if capture_attention else None)


def _graph_logits(
    weights: Mapping[str, Tensor],
    node_feats: Tensor,
    graph: SupervoxelGraph,
    pe: np.ndarray,
    config: ModelConfig,
    training: bool,
    rng: Optional[np.random.Generator],
) -> Tensor:
    fused, _ = graph_encoder_forward(node_feats, pe, graph.edges, weights, config)
    return classifier_forward(fused, weights, config.dropout, training, rng)


def predict(
    params: ParamStore,
    graph: SupervoxelGraph,
    pe: np.ndarray,
    config: ModelConfig,
    capture_attention: bool = False,
) -> ForwardOutput:
    """Evaluation-mode forward: no dropout, no tape."""
    feats, attention = embed_nodes(params, graph.patches, config, capture_attention)
    logits = _graph_logits(
        _subset(params, None, embedder=False), Tensor(feats), graph, pe, config, False, None
    )
    captured = CaseAttention(graph.case_id, attention) if attention is not None else None
    return ForwardOutput(logits=logits.data.reshape(-1), attention=captured)


def evaluation_loss(logits: np.ndarray, labels: np.ndarray, config: ModelConfig) -> LossComponents:
    _, components = compound_loss(Tensor(logits.reshape(-1, 1)), labels, LossWeights.from_config(config))
    return components


def _monolithic_grads(
    params: ParamStore,
    graph: SupervoxelGraph,
    pe: np.ndarray,
    config: ModelConfig,
    training: bool,
    rng: Optional[np.random.Generator],
) -> tuple[LossComponents, dict[str, np.ndarray]]:
    tape = Tape(params.dtype)
    weights = params.on_tape(tape)
    feats, _ = node_embedder_forward(graph.patches, weights, config)
    logits = _graph_logits(weights, feats, graph, pe, config, training, rng)
    loss, components = compound_loss(logits, graph.labels, LossWeights.from_config(config))
    return components, backward(tape, loss)


def loss_and_grads(
    params: ParamStore,
    graph: SupervoxelGraph,
    pe: np.ndarray,
    config: ModelConfig,
    rng: Optional[np.random.Generator] = None,
    training: bool = True,
    monolithic: bool = False,
) -> tuple[LossComponents, dict[str, np.ndarray]]:
    """Compound loss of one graph and the gradient of every parameter, in store order."""
    if monolithic:
        return _monolithic_grads(params, graph, pe, config, training, rng)

    feats, _ = embed_nodes(params, graph.patches, config)
    tape = Tape(params.dtype)
    head_weights = _subset(params, tape, embedder=False)
    leaf = tape.leaf(NODE_FEATS, feats)
    logits = _graph_logits(head_weights, leaf, graph, pe, config, training, rng)
    loss, components = compound_loss(logits, graph.labels, LossWeights.from_config(config))
    grads = backward(tape, loss)
    upstream = grads.pop(NODE_FEATS)

    embedder_grads = {n: np.zeros_like(params[n]) for n in params if n.startswith(EMBEDDER_PREFIX)}
    for start in range(0, graph.n_nodes, config.node_chunk):
        chunk = slice(start, start + config.node_chunk)
        chunk_tape = Tape(params.dtype)
        weights = _subset(params, chunk_tape, embedder=True)
        out, _ = node_embedder_forward(graph.patches[chunk], weights, config)
        surrogate = ops.sum(ops.mul(out, upstream[chunk]))
        for name, grad in backward(chunk_tape, surrogate).items():
            embedder_grads[name] = embedder_grads[name] + grad
    grads.update(embedder_grads)
    return components, {name: grads[name] for name in params}
