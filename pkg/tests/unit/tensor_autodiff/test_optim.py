import math

import numpy as np
import pytest

from fedsvg_runtime.domain.tensor_autodiff.optim import (
    AdamWState,
    adamw_step,
    clip_grad_norm,
    cosine_warm_restart_lr,
)
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore


def store(value, dtype=np.float64) -> ParamStore:
    return ParamStore({"p": np.atleast_1d(np.asarray(value, dtype=np.float64))}, dtype=dtype)


def test_zero_gradient_without_decay_leaves_parameters():
    params = store([1.0, -2.0, 3.0])
    updated, state = adamw_step(params, {"p": np.zeros(3)}, AdamWState(), lr=0.1, weight_decay=0.0)
    np.testing.assert_array_equal(updated["p"], params["p"])
    assert state.step == 1


def test_first_step_moves_by_learning_rate():
    updated, _ = adamw_step(store(0.5), {"p": np.ones(1)}, AdamWState(), lr=0.1, weight_decay=0.0)
    assert updated["p"][0] - 0.5 == pytest.approx(-0.1, abs=1e-6)


def test_decay_only_step():
    updated, _ = adamw_step(store(1.0), {"p": np.zeros(1)}, AdamWState(), lr=0.1, weight_decay=0.01)
    assert updated["p"][0] == pytest.approx(0.999)


def test_zero_learning_rate_is_bitwise_identity():
    params = store([0.1, 0.2], dtype=np.float32)
    updated, _ = adamw_step(params, {"p": np.array([5.0, -3.0])}, AdamWState(), lr=0.0)
    assert updated.equals(params)


def test_state_carries_between_steps():
    params = store(0.0)
    _, state = adamw_step(params, {"p": np.ones(1)}, AdamWState(), lr=0.1, weight_decay=0.0)
    _, state = adamw_step(params, {"p": np.ones(1)}, state, lr=0.1, weight_decay=0.0)
    assert state.step == 2
    assert state.m["p"][0] == pytest.approx(0.19)


def test_schedule_starts_at_base_lr():
    assert cosine_warm_restart_lr(0, 1e-3, t0=10) == pytest.approx(1e-3)


def test_schedule_halfway_through_period():
    assert cosine_warm_restart_lr(5, 1e-3, t0=10) == pytest.approx(5e-4)
    # second period is 20 long and starts at step 10
    assert cosine_warm_restart_lr(20, 1e-3, t0=10, t_mult=2) == pytest.approx(5e-4)


def test_schedule_restarts_at_period_boundary():
    before = cosine_warm_restart_lr(9, 1e-3, t0=10)
    assert before < 1e-4
    assert cosine_warm_restart_lr(10, 1e-3, t0=10) == pytest.approx(1e-3)
    assert cosine_warm_restart_lr(30, 1e-3, t0=10, t_mult=2) == pytest.approx(1e-3)


def test_schedule_rejects_empty_period():
    with pytest.raises(ValueError):
        cosine_warm_restart_lr(0, 1e-3, t0=0)


def test_clip_scales_to_max_norm():
    clipped, norm = clip_grad_norm({"g": np.array([3.0, 4.0])}, max_norm=1.0)
    assert norm == pytest.approx(5.0)
    np.testing.assert_allclose(clipped["g"], [0.6, 0.8])


def test_clip_leaves_small_gradients():
    grads = {"a": np.array([0.3]), "b": np.array([0.4])}
    clipped, norm = clip_grad_norm(grads, max_norm=1.0)
    assert norm == pytest.approx(0.5)
    np.testing.assert_array_equal(clipped["a"], grads["a"])
    np.testing.assert_array_equal(clipped["b"], grads["b"])


def test_clip_zero_gradients():
    clipped, norm = clip_grad_norm({"g": np.zeros(4)})
    assert norm == 0.0
    np.testing.assert_array_equal(clipped["g"], np.zeros(4))


def test_clip_uses_global_norm_across_tensors():
    clipped, norm = clip_grad_norm({"a": np.array([6.0]), "b": np.array([8.0])}, max_norm=2.0)
    assert norm == pytest.approx(10.0)
    total = math.sqrt(clipped["a"][0] ** 2 + clipped["b"][0] ** 2)
    assert total == pytest.approx(2.0)
