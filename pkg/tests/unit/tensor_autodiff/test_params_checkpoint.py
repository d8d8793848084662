import numpy as np
import pytest

from fedsvg_runtime.application.errors import FormatError, ShapeMismatchError
from fedsvg_runtime.domain.tensor_autodiff.checkpoint import (
    decode_checkpoint,
    encode_checkpoint,
    read_checkpoint,
    write_checkpoint,
)
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore


@pytest.fixture
def params() -> ParamStore:
    rng = np.random.default_rng(0)
    return ParamStore({"layer.w": rng.normal(size=(3, 2)), "layer.b": rng.normal(size=2), "scale": [1.5]})


def test_flatten_follows_declaration_order(params):
    flat = params.flatten()
    assert flat.shape == (params.size,)
    np.testing.assert_array_equal(flat[:6], params["layer.w"].ravel())
    assert flat[-1] == pytest.approx(1.5)


def test_unflatten_restores_shapes(params):
    restored = params.unflatten(params.flatten() * 2)
    assert restored.shapes == params.shapes
    np.testing.assert_allclose(restored["layer.b"], params["layer.b"] * 2)


def test_unflatten_rejects_wrong_length(params):
    with pytest.raises(ShapeMismatchError):
        params.unflatten(np.zeros(params.size + 1))


def test_arrays_are_read_only(params):
    with pytest.raises(ValueError):
        params["scale"][0] = 2.0


def test_replace_checks_names_and_shapes(params):
    with pytest.raises(ShapeMismatchError):
        params.replace({"missing": np.zeros(1)})
    with pytest.raises(ShapeMismatchError):
        params.replace({"scale": np.zeros(2)})
    assert params.replace({"scale": [3.0]})["scale"][0] == pytest.approx(3.0)


def test_checkpoint_file_roundtrip(params, tmp_path):
    path = tmp_path / "model.ckpt"
    write_checkpoint(params, path)
    restored = read_checkpoint(path)
    assert restored.names == params.names
    assert restored.equals(params)


def test_checkpoint_layout_size(params):
    payload = encode_checkpoint(params)
    header = 4 + 4 + 4
    entries = sum(4 + len(name) + 4 + 4 * len(shape) for name, shape in params.shapes.items())
    assert len(payload) == header + entries + 4 * params.size


def test_checkpoint_bad_magic_and_truncation(params):
    payload = encode_checkpoint(params)
    with pytest.raises(FormatError):
        decode_checkpoint(b"XXXX" + payload[4:])
    with pytest.raises(FormatError):
        decode_checkpoint(payload[:-3])
    with pytest.raises(FormatError):
        decode_checkpoint(payload + b"\x00")
