import numpy as np
import pytest

from fedsvg_runtime.application.errors import ShapeMismatchError
from fedsvg_runtime.domain.model.embedder import modality_ids, node_embedder_forward
from fedsvg_runtime.domain.model.init import init_params, parameter_count, parameter_shapes
from fedsvg_runtime.domain.model.network import predict


def embedder_weights(params):
    return params.on_tape(None)


def test_zero_query_key_projections_give_uniform_cls_attention(make_graph, tiny_model):
    graph = make_graph(n_nodes=3)
    params = init_params(tiny_model, graph.patches.shape[-1], seed=0, dtype=np.float64)
    params = params.replace(
        {name: np.zeros(params[name].shape) for name in params if ".attn.wq" in name or ".attn.wk" in name}
    )
    params = params.replace(
        {name: np.zeros(params[name].shape) for name in params if ".attn.bq" in name or ".attn.bk" in name}
    )
    _, attention = node_embedder_forward(graph.patches, embedder_weights(params), tiny_model, capture_attention=True)
    n_tokens = graph.patches.shape[1] + 1
    assert attention.shape == (3, tiny_model.n_embedder_layers, tiny_model.n_heads, n_tokens)
    np.testing.assert_allclose(attention, np.full(attention.shape, 1.0 / n_tokens), atol=1e-12)


def test_cls_attention_rows_are_distributions(make_graph, tiny_model):
    graph = make_graph(n_nodes=4)
    params = init_params(tiny_model, graph.patches.shape[-1], seed=1, dtype=np.float64)
    output = predict(params, graph, np.zeros((4, tiny_model.pe_dim)), tiny_model, capture_attention=True)
    rows = output.attention.rows
    np.testing.assert_allclose(rows.sum(axis=-1), np.ones(rows.shape[:-1]), atol=1e-12)
    assert output.attention.case_id == graph.case_id


def test_output_invariant_to_patch_order_within_a_modality(make_graph, tiny_model):
    graph = make_graph(n_nodes=2)
    params = init_params(tiny_model, graph.patches.shape[-1], seed=2, dtype=np.float64)
    patches = graph.patches.astype(np.float64)
    swapped = patches.copy()
    swapped[:, [0, 1]] = patches[:, [1, 0]]
    a, _ = node_embedder_forward(patches, embedder_weights(params), tiny_model)
    b, _ = node_embedder_forward(swapped, embedder_weights(params), tiny_model)
    np.testing.assert_allclose(a.data, b.data, atol=1e-12)


def test_wrong_feature_width_rejected(make_graph, tiny_model):
    graph = make_graph(n_nodes=2)
    params = init_params(tiny_model, graph.patches.shape[-1] + 1, seed=0, dtype=np.float64)
    with pytest.raises(ShapeMismatchError):
        node_embedder_forward(graph.patches, embedder_weights(params), tiny_model)


def test_modality_ids_are_block_major():
    np.testing.assert_array_equal(modality_ids(8), [0, 0, 1, 1, 2, 2, 3, 3])
    with pytest.raises(ShapeMismatchError):
        modality_ids(6)


def test_parameter_declaration_is_stable(tiny_model):
    shapes = parameter_shapes(tiny_model, 6)
    names = list(shapes)
    assert names[0] == "emb.patch.w"
    assert names[-1] == "cls.fc3.b"
    assert shapes["emb.out.w"] == (16, 8)
    assert shapes["gnn.in.w"] == (8 + tiny_model.pe_dim, 8)
    assert shapes["gnn.fuse.w"] == (tiny_model.n_gnn_layers * 8, 8)
    assert parameter_count(tiny_model, 6) == sum(int(np.prod(s)) for s in shapes.values())


def test_initialisation_is_seeded(tiny_model):
    a = init_params(tiny_model, 6, seed=5)
    b = init_params(tiny_model, 6, seed=5)
    c = init_params(tiny_model, 6, seed=6)
    assert a.equals(b)
    assert not a.equals(c)
    np.testing.assert_array_equal(a["emb.block0.ln1.g"], np.ones(8))
    np.testing.assert_array_equal(a["cls.fc1.b"], np.zeros(8))
