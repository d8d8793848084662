"""Shapes of the files downstream tooling reads: summaries, round tables and CLI errors."""

import json
from pathlib import Path

import jsonschema
import pandas as pd
import pytest

from fedsvg_runtime.adapters.outputs.file_outputs_repository import FileOutputsRepository
from fedsvg_runtime.app.cli import main
from fedsvg_runtime.application.paradigms import (
    TrainingData,
    run_centralized,
    run_federated,
    run_isolated,
)
from fedsvg_runtime.domain.federation.partition import partition_dataset

SCHEMAS = Path(__file__).resolve().parents[2] / "schemas"
ROUND_HEADER = [
    "paradigm",
    "client",
    "round",
    "loss",
    "dice",
    "precision",
    "recall",
    "f1",
    "lr",
    "bytes_fp32",
    "bytes_half",
    "wall_time_s",
]


def load_schema(name: str) -> dict:
    return json.loads((SCHEMAS / name).read_text(encoding="utf-8"))


@pytest.mark.parametrize("fn", [run_centralized, run_federated, run_isolated])
def test_summaries_match_schema(fn, make_case, tiny_run_config, tmp_path):
    cases = {f"case_{i:04d}": make_case(f"case_{i:04d}", seed=i) for i in range(8)}
    data = TrainingData(partition_dataset(sorted(cases), tiny_run_config.partition, 3), cases)
    result = fn(data, tiny_run_config, 3)
    jsonschema.validate(instance=result.summary, schema=load_schema("run_summary.schema.json"))

    outputs = FileOutputsRepository(tmp_path)
    outputs.write_rounds(result.reports)
    rounds = pd.read_csv(tmp_path / "rounds.csv", dtype={"client": str})
    assert list(rounds.columns) == ROUND_HEADER
    assert set(rounds["paradigm"]) == {result.paradigm}
    assert json.loads(json.dumps(result.summary)) == result.summary


def test_summary_schema_rejects_unknown_fields():
    summary = {
        "paradigm": "centralized",
        "seed": 1,
        "stopped_round": 0,
        "best_round": 0,
        "best_dice": 0.5,
        "final": {"loss": 1.0, "dice": 0.5, "precision": 0.5, "recall": 0.5, "f1": 0.5, "n_cases": 2},
        "n_parameters": 10,
        "clients": [],
        "communication": None,
    }
    schema = load_schema("run_summary.schema.json")
    jsonschema.validate(instance=summary, schema=schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(instance={**summary, "extra": 1}, schema=schema)


def test_cli_reports_one_error_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"model": {"d_model": 10, "n_heads": 4}}), encoding="utf-8")
    code = main(["train", "--config", str(bad)])
    err = capsys.readouterr().err.strip().splitlines()
    assert code == 2
    assert len(err) == 1
    assert err[0].startswith("error=ConfigValidationError message=model")


def test_cli_missing_artifacts_exit_code(tmp_path, capsys):
    code = main(["preprocess", "--out-dir", str(tmp_path)])
    assert code == 2
    assert capsys.readouterr().err.startswith("error=MissingArtifactError")


def test_config_check_prints_hash(tmp_path, capsys):
    path = tmp_path / "ok.json"
    path.write_text(json.dumps({"seed": 4}), encoding="utf-8")
    assert main(["config", "--check", str(path)]) == 0
    result = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert result["valid"] is True
    assert len(result["config_hash"]) == 64
