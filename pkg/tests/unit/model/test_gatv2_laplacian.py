import numpy as np
import pytest

from fedsvg_runtime.application.errors import ShapeMismatchError, SpecValidationError
from fedsvg_runtime.domain.model.gatv2 import LEAKY_SLOPE, gatv2_layer_forward, with_self_loops
from fedsvg_runtime.domain.model.graph_encoder import graph_encoder_forward, message_edges
from fedsvg_runtime.domain.model.init import init_params
from fedsvg_runtime.domain.model.laplacian import laplacian_pe, normalized_laplacian
from fedsvg_runtime.domain.tensor_autodiff import ops


def layer_params(d: int, n_heads: int, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    raw = {
        "w": rng.normal(size=(2 * d, d)),
        "att": rng.normal(size=(n_heads, d // n_heads)),
        "wv": rng.normal(size=(d, d)),
        "mix.w": rng.normal(size=(d, d)),
        "mix.b": rng.normal(size=(d,)),
    }
    return {"g." + k: v for k, v in raw.items()}


def as_tensors(raw: dict) -> dict:
    return {k: ops.as_tensor(v, None, np.float64) for k, v in raw.items()}


def dense_gatv2(h: np.ndarray, edges: np.ndarray, raw: dict, n_heads: int):
    """Per-node loop over explicit neighbourhoods."""
    n, d = h.shape
    hd = d // n_heads
    w, att, wv = raw["g.w"], raw["g.att"], raw["g.wv"]
    out = np.zeros((n, d))
    for i in range(n):
        nbrs = [int(s) for s, t in edges if t == i] + [i]
        for head in range(n_heads):
            cols = slice(head * hd, (head + 1) * hd)
            scores = []
            for j in nbrs:
                z = (h[i] @ w[:d] + h[j] @ w[d:])[cols]
                scores.append(np.where(z > 0, z, LEAKY_SLOPE * z) @ att[head])
            scores = np.array(scores)
            alpha = np.exp(scores - scores.max())
            alpha /= alpha.sum()
            out[i, cols] = sum(a * (h[j] @ wv)[cols] for a, j in zip(alpha, nbrs))
    return out @ raw["g.mix.w"] + raw["g.mix.b"]


def test_single_node_attends_only_to_itself():
    raw = layer_params(4, 2)
    h = np.random.default_rng(1).normal(size=(1, 4))
    out, alpha = gatv2_layer_forward(ops.as_tensor(h, None, np.float64), np.zeros((0, 2)), as_tensors(raw), "g.", 2)
    np.testing.assert_allclose(alpha.data, np.ones((1, 2)))
    np.testing.assert_allclose(out.data, (h @ raw["g.wv"]) @ raw["g.mix.w"] + raw["g.mix.b"], rtol=1e-12)


def test_layer_matches_dense_reference():
    raw = layer_params(6, 3, seed=2)
    h = np.random.default_rng(3).normal(size=(5, 6))
    edges = np.array([[0, 1], [2, 1], [3, 1], [1, 0], [4, 3], [0, 4]])
    out, alpha = gatv2_layer_forward(ops.as_tensor(h, None, np.float64), edges, as_tensors(raw), "g.", 3)
    np.testing.assert_allclose(out.data, dense_gatv2(h, edges, raw, 3), rtol=1e-10, atol=1e-12)
    src, dst = with_self_loops(edges, 5)
    sums = np.zeros((5, 3))
    np.add.at(sums, dst, alpha.data)
    np.testing.assert_allclose(sums, 1.0)
    assert len(src) == len(edges) + 5


def test_out_of_range_edge_is_rejected():
    with pytest.raises(ShapeMismatchError):
        with_self_loops(np.array([[0, 3]]), 3)


def test_knn_rows_become_inbound_messages():
    np.testing.assert_array_equal(message_edges(np.array([[0, 1], [0, 2]])), [[1, 0], [2, 0]])


def test_encoder_fuses_to_model_width(tiny_model):
    params = init_params(tiny_model, 6, seed=0, dtype=np.float64).on_tape(None)
    feats = ops.as_tensor(np.random.default_rng(0).normal(size=(5, tiny_model.d_model)), None, np.float64)
    edges = np.array([[i, (i + 1) % 5] for i in range(5)])
    fused, layers = graph_encoder_forward(feats, np.zeros((5, tiny_model.pe_dim)), edges, params, tiny_model)
    assert fused.shape == (5, tiny_model.d_model)
    assert len(layers) == tiny_model.n_gnn_layers
    with pytest.raises(ShapeMismatchError):
        graph_encoder_forward(feats, np.zeros((5, tiny_model.pe_dim + 1)), edges, params, tiny_model)


def ring(n: int) -> np.ndarray:
    return np.array([[i, (i + 1) % n] for i in range(n)])


def test_pe_columns_are_orthonormal_eigenvectors():
    edges = np.concatenate([ring(8), [[0, 4], [2, 6]]])
    pe = laplacian_pe(edges, 8, 3)
    lap = normalized_laplacian(edges, 8)
    np.testing.assert_allclose(pe.T @ pe, np.eye(3), atol=1e-10)
    for col in pe.T:
        value = col @ lap @ col
        np.testing.assert_allclose(lap @ col, value * col, atol=1e-8)
        assert value > 1e-9


def test_isolated_nodes_get_zero_rows_and_columns_pad():
    # a triangle plus two isolated nodes: two nontrivial eigenvectors only
    edges = np.array([[0, 1], [1, 2], [2, 0]])
    pe = laplacian_pe(edges, 5, 4)
    assert pe.shape == (5, 4)
    np.testing.assert_array_equal(pe[3:], 0.0)
    np.testing.assert_array_equal(pe[:, 2:], 0.0)
    assert np.all(np.linalg.norm(pe[:, :2], axis=0) > 0.99)


def test_pe_sign_flip_only_changes_signs():
    edges = ring(7)
    canonical = laplacian_pe(edges, 7, 2)
    flipped = laplacian_pe(edges, 7, 2, rng=np.random.default_rng(5))
    np.testing.assert_allclose(np.abs(flipped), np.abs(canonical))


def test_pe_needs_more_nodes_than_columns():
    with pytest.raises(SpecValidationError):
        laplacian_pe(ring(3), 3, 3)
