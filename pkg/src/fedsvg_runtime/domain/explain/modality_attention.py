"""Per-modality CLS attention.

For layer l and modality m the attention of one node is
``(1/H) sum_h (1/P) sum_{j in block m} alpha[l, h, j]`` over the patch tokens
of that modality block; the CLS self-attention (token 0) is not part of any
block. Case values are the unweighted mean over nodes.
"""

from __future__ import annotations

from collections import OrderedDict
from typing import Iterable

import numpy as np

from fedsvg_runtime.domain.common.errors import ShapeMismatchError, SpecValidationError
from fedsvg_runtime.domain.explain.models import ModalityAttention
from fedsvg_runtime.domain.model.attention import AttentionRecord, CaseAttention
from fedsvg_runtime.domain.volume_forge.config import MODALITIES


def case_modality_attention(case: CaseAttention) -> ModalityAttention:
    n_nodes, n_layers, n_heads, n_tokens = case.rows.shape
    n_patches, rest = divmod(n_tokens - 1, len(MODALITIES))
    if rest or n_patches < 1:
        raise ShapeMismatchError(f"{n_tokens} tokens is not CLS + {len(MODALITIES)} equal blocks")
    blocks = case.rows[..., 1:].astype(np.float64).reshape(
        n_nodes, n_layers, n_heads, len(MODALITIES), n_patches
    )
    per_node = blocks.mean(axis=-1).mean(axis=2)
    return ModalityAttention(case.case_id, per_node.mean(axis=0))


def modality_attention(
    records: Iterable[AttentionRecord], n_layers: int, n_heads: int
) -> list[ModalityAttention]:
    """Group a record stream by case and reduce each case; cases keep first-seen order."""
    by_case: OrderedDict[str, dict[tuple[int, int, int], np.ndarray]] = OrderedDict()
    for record in records:
        by_case.setdefault(record.case_id, {})[(record.node, record.layer, record.head)] = record.row
    results = []
    for case_id, rows in by_case.items():
        n_nodes = 1 + max(node for node, _, _ in rows)
        expected = {
            (node, layer, head)
            for node in range(n_nodes)
            for layer in range(n_layers)
            for head in range(n_heads)
        }
        missing = expected - set(rows)
        if missing:
            node, layer, head = min(missing)
            raise SpecValidationError(
                "records", f"case {case_id} lacks node {node} layer {layer} head {head}"
            )
        if set(rows) - expected:
            raise SpecValidationError("records", f"case {case_id} has layers or heads out of range")
        stacked = np.stack(
            [
                np.stack([rows[(node, layer, head)] for head in range(n_heads)])
                for node in range(n_nodes)
                for layer in range(n_layers)
            ]
        ).reshape(n_nodes, n_layers, n_heads, -1)
        results.append(case_modality_attention(CaseAttention(case_id, stacked)))
    return results
