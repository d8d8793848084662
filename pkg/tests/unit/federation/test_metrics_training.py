import numpy as np
import pytest

from fedsvg_runtime.application.errors import NonFiniteLossError
from fedsvg_runtime.domain.common.ids import ClientId
from fedsvg_runtime.domain.federation.config import TrainingConfig
from fedsvg_runtime.domain.federation.local_training import batch_order, local_train_epoch
from fedsvg_runtime.domain.federation.metrics import NodeCounts, dice_score, eval_metrics, voxel_dice
from fedsvg_runtime.domain.federation.models import ClientState, EarlyStopper
from fedsvg_runtime.domain.model.init import init_params


def mask(indices, size=8):
    out = np.zeros(size, dtype=bool)
    out[list(indices)] = True
    return out


def test_dice_of_half_overlap():
    assert dice_score(mask({1, 2, 3, 4}), mask({3, 4, 5, 6})) == 0.5


def test_dice_conventions():
    assert dice_score(mask(set()), mask(set())) == 1.0
    assert dice_score(mask(set()), mask({2})) == 0.0


def test_supervoxels_tiling_the_truth_score_one(make_case):
    case = make_case(n_nodes=6)
    labels = case.graph.labels.astype(bool)
    assert voxel_dice(case.graph, labels, case.mask) == 1.0
    assert voxel_dice(case.graph, np.zeros(6, dtype=bool), case.mask) == 0.0


def test_node_count_conventions():
    counts = NodeCounts.of([1, 1, 0, 0], [1, 0, 1, 0])
    assert (counts.tp, counts.fp, counts.fn) == (1, 1, 1)
    assert counts.precision == counts.recall == counts.f1 == 0.5
    assert NodeCounts(fn=2).precision == 0.0
    assert NodeCounts().precision == NodeCounts().recall == 1.0
    assert NodeCounts(fp=3).recall == 1.0
    assert NodeCounts(fp=3).f1 == 0.0


def test_eval_metrics_average_over_cases(make_case, tiny_model):
    cases = [make_case(f"case_{i:04d}", seed=i) for i in range(3)]
    params = init_params(tiny_model, 6, seed=0)
    metrics = eval_metrics(params, cases, tiny_model)
    assert metrics.n_cases == 3
    assert 0.0 <= metrics.dice <= 1.0
    assert np.isfinite(metrics.loss)
    assert eval_metrics(params, [], tiny_model).n_cases == 0


def test_early_stopper_waits_out_patience():
    stopper = EarlyStopper(patience=2)
    assert not stopper.update(0, 0.5, None)
    assert not stopper.update(1, 0.4, None)
    assert not stopper.update(2, 0.5, None)
    assert stopper.update(3, 0.3, None)
    assert stopper.best_round == 0
    assert stopper.best_metric == 0.5


def client_of(make_case, tiny_model, n_train=2) -> ClientState:
    cases = [make_case(f"case_{i:04d}", seed=i) for i in range(n_train + 1)]
    params = init_params(tiny_model, 6, seed=0, dtype=np.float64)
    return ClientState(ClientId(0), cases[:n_train], cases[n_train:], params)


def test_zero_learning_rate_keeps_global_parameters(make_case, tiny_model):
    client = client_of(make_case, tiny_model)
    training = TrainingConfig(lr=0.0, weight_decay=0.0, batch_size=1, accumulation_steps=1)
    new_params, metrics = local_train_epoch(client, client.params, training, tiny_model, 0, seed=1)
    assert new_params.equals(client.params)
    assert metrics.n_graphs == 2
    assert metrics.n_steps == 2
    assert metrics.lr == 0.0


def test_accumulation_groups_batches_into_one_step(make_case, tiny_model):
    client = client_of(make_case, tiny_model, n_train=3)
    training = TrainingConfig(lr=1e-3, batch_size=1, accumulation_steps=2)
    start = client.params
    new_params, metrics = local_train_epoch(client, start, training, tiny_model, 0, seed=1)
    assert metrics.n_steps == 2
    assert client.optimizer.step == 2
    assert not new_params.equals(start)


def test_local_training_is_deterministic(make_case, tiny_model):
    training = TrainingConfig(lr=1e-2, batch_size=1, accumulation_steps=1)
    first = client_of(make_case, tiny_model)
    second = client_of(make_case, tiny_model)
    a, _ = local_train_epoch(first, first.params, training, tiny_model, 4, seed=9)
    b, _ = local_train_epoch(second, second.params, training, tiny_model, 4, seed=9)
    assert a.equals(b)


def test_non_finite_loss_carries_context(make_case, tiny_model):
    client = client_of(make_case, tiny_model)
    poisoned = client.params.replace({"cls.fc3.b": np.array([np.nan])})
    with pytest.raises(NonFiniteLossError) as info:
        local_train_epoch(client, poisoned, TrainingConfig(), tiny_model, 0, seed=0)
    assert info.value.context["round"] == 0
    assert info.value.context["case_id"].startswith("case_")


def test_step_strategy_repeats_permutations():
    training = TrainingConfig(local_strategy="steps", local_steps=5, batch_size=2)
    order = batch_order(3, training, np.random.default_rng(0))
    assert len(order) == 10
    assert sorted(order[:3]) == [0, 1, 2]
