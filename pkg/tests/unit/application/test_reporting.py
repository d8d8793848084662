import pytest

from fedsvg_runtime.adapters.outputs.file_outputs_repository import FileOutputsRepository
from fedsvg_runtime.application.errors import MissingArtifactError
from fedsvg_runtime.application.paradigms import (
    TrainingData,
    run_centralized,
    run_federated,
    run_isolated,
)
from fedsvg_runtime.application.reporting import (
    comparison_table,
    format_table,
    load_run,
    training_curves,
)
from fedsvg_runtime.domain.federation.partition import partition_dataset


@pytest.fixture
def run_dirs(tmp_path, make_case, tiny_run_config):
    config = tiny_run_config.model_copy(
        update={"training": tiny_run_config.training.model_copy(update={"rounds": 2, "epochs": 2})}
    )
    cases = {f"case_{i:04d}": make_case(f"case_{i:04d}", seed=i) for i in range(8)}
    data = TrainingData(partition_dataset(sorted(cases), config.partition, config.seed), cases)
    dirs = []
    for fn, seed in ((run_centralized, 1), (run_federated, 1), (run_federated, 2), (run_isolated, 1)):
        result = fn(data, config, seed)
        outputs = FileOutputsRepository(tmp_path / result.paradigm / f"seed{seed}")
        outputs.write_rounds(result.reports)
        outputs.write_summary(result.summary)
        dirs.append(outputs.run_dir)
    return dirs


def test_comparison_table_rows(run_dirs):
    table = comparison_table([load_run(d) for d in run_dirs])
    assert list(table["row"]) == [
        "centralized",
        "federated",
        "isolated (avg)",
        "isolated client 0",
        "isolated client 1",
        "isolated client 2",
        "isolated client 3",
    ]
    assert list(table["n_runs"]) == [1, 2, 1, 1, 1, 1, 1]
    assert table.loc[0, "dice_std"] == 0.0
    assert {"dice_mean", "precision_mean", "recall_mean", "f1_std"} <= set(table.columns)
    assert format_table(table).splitlines()[0] == "row | n | Dice | Precision | Recall | F1"


def test_training_curves_keep_every_round(run_dirs):
    runs = [load_run(d) for d in run_dirs]
    curves = training_curves(runs)
    assert list(curves.columns) == ["paradigm", "client", "seed", "round", "loss", "dice", "lr"]
    assert len(curves) == sum(len(r.rounds) for r in runs)
    assert set(curves[curves["paradigm"] == "federated"]["seed"]) == {1, 2}


def test_unfinished_run_directory_is_reported(tmp_path):
    with pytest.raises(MissingArtifactError):
        load_run(tmp_path)
    with pytest.raises(MissingArtifactError):
        comparison_table([])
