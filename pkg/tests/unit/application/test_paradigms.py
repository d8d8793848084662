import itertools

import numpy as np
import pytest

from fedsvg_runtime.application.errors import SpecValidationError
from fedsvg_runtime.application.paradigms import (
    TrainingData,
    run_centralized,
    run_federated,
    run_isolated,
)
from fedsvg_runtime.application.registry import Registry
from fedsvg_runtime.domain.federation.models import PartitionPlan
from fedsvg_runtime.domain.federation.partition import partition_dataset


@pytest.fixture
def training_data(make_case):
    def _build(config, n_cases=8):
        cases = {f"case_{i:04d}": make_case(f"case_{i:04d}", seed=i) for i in range(n_cases)}
        return TrainingData(splits=partition_dataset(sorted(cases), config.partition, config.seed), cases=cases)

    return _build


def test_single_client_federation_equals_centralized(tiny_run_config, training_data):
    config = tiny_run_config.model_copy(update={"partition": PartitionPlan(fractions=(1.0,))})
    data = training_data(config, n_cases=5)
    central = run_centralized(data, config, config.seed)
    federated = run_federated(data, config, config.seed)
    for name in ("final.ckpt", "best.ckpt"):
        a, b = central.checkpoints[name], federated.checkpoints[name]
        assert max(float(np.max(np.abs(a[n] - b[n]))) for n in a) < 1e-6
    assert central.summary["best_round"] == federated.summary["best_round"]


def test_single_client_trajectory_matches_over_twenty_rounds(tiny_run_config, training_data):
    training = tiny_run_config.training.model_copy(update={"rounds": 20, "epochs": 20, "patience": 100})
    config = tiny_run_config.model_copy(
        update={"partition": PartitionPlan(fractions=(1.0,)), "training": training}
    )
    data = training_data(config, n_cases=5)
    central = run_centralized(data, config, config.seed)
    federated = run_federated(data, config, config.seed)
    global_rows = [r for r in federated.reports if r.client == "global"]
    assert len(central.reports) == len(global_rows) == 20
    for a, b in zip(central.reports, global_rows):
        assert a.round == b.round
        assert a.loss == pytest.approx(b.loss, abs=1e-6)
        assert a.dice == pytest.approx(b.dice, abs=1e-6)
    a, b = central.checkpoints["final.ckpt"], federated.checkpoints["final.ckpt"]
    assert max(float(np.max(np.abs(a[n] - b[n]))) for n in a) < 1e-6


def test_federated_reports_global_and_client_rows(tiny_run_config, training_data):
    data = training_data(tiny_run_config)
    result = run_federated(data, tiny_run_config, tiny_run_config.seed)
    rounds = tiny_run_config.training.rounds
    assert len(result.reports) == rounds * 5
    assert [r.client for r in result.reports[:5]] == ["global", "0", "1", "2", "3"]
    per_round = result.summary["communication"]["per_client_round_fp32"]
    assert result.reports[0].bytes_fp32 == 4 * per_round
    assert result.reports[1].bytes_fp32 == per_round
    assert result.summary["communication"]["rounds"] == rounds
    assert result.summary["communication"]["bytes_half"] == rounds * 4 * per_round // 2
    assert [c["n_train"] for c in result.summary["clients"]] == [1, 1, 2, 1]
    assert set(result.checkpoints) == {"best.ckpt", "final.ckpt"}
    assert all(r.wall_time_s == 0.0 for r in result.reports)


def test_federated_wall_time_uses_the_clock(tiny_run_config, training_data):
    config = tiny_run_config.model_copy(
        update={"training": tiny_run_config.training.model_copy(update={"deterministic_outputs": False})}
    )
    result = run_federated(training_data(config), config, config.seed, clock=itertools.count().__next__)
    walls = [r.wall_time_s for r in result.reports if r.client == "global"]
    assert walls == sorted(walls) and walls[-1] > 0


def test_isolated_trains_every_client_separately(tiny_run_config, training_data):
    data = training_data(tiny_run_config)
    result = run_isolated(data, tiny_run_config, tiny_run_config.seed)
    assert set(result.checkpoints) == {f"best_client{k}.ckpt" for k in range(4)}
    assert {r.client for r in result.reports} == {"0", "1", "2", "3"}
    assert result.summary["communication"] is None
    assert result.summary["final"]["n_cases"] == len(data.pooled_test())
    dices = [c["final"]["dice"] for c in result.summary["clients"]]
    assert result.summary["final"]["dice"] == pytest.approx(np.mean(dices))


def test_runs_are_reproducible(tiny_run_config, training_data):
    data = training_data(tiny_run_config)
    first = run_centralized(data, tiny_run_config, 11)
    second = run_centralized(data, tiny_run_config, 11)
    assert first.checkpoints["final.ckpt"].equals(second.checkpoints["final.ckpt"])
    assert first.summary == second.summary


def test_early_stopping_keeps_the_best_round(tiny_run_config, training_data):
    training = tiny_run_config.training.model_copy(update={"patience": 0, "epochs": 6, "lr": 0.0})
    config = tiny_run_config.model_copy(update={"training": training})
    result = run_centralized(training_data(config), config, config.seed)
    # a frozen model never improves after its first evaluation
    assert result.summary["best_round"] == 0
    assert result.summary["stopped_round"] == 1
    assert result.checkpoints["best.ckpt"].equals(result.checkpoints["final.ckpt"])


def test_registry_lookup():
    registry = Registry()
    assert registry.names == ["centralized", "federated", "isolated"]
    assert registry.get("federated") is run_federated
    with pytest.raises(SpecValidationError):
        registry.get("swarm")
