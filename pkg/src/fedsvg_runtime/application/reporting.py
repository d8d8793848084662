"""Paradigm comparison table and training curves from finished run directories."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import pandas as pd

from fedsvg_runtime.application.errors import MissingArtifactError

logger = logging.getLogger(__name__)

METRICS = ("dice", "precision", "recall", "f1")
PARADIGM_ORDER = ("centralized", "federated", "isolated")


@dataclass(frozen=True)
class RunRecord:
    run_dir: Path
    summary: dict
    rounds: pd.DataFrame


def load_run(run_dir: str | Path) -> RunRecord:
    run_dir = Path(run_dir)
    summary_path = run_dir / "summary.json"
    rounds_path = run_dir / "rounds.csv"
    missing = [str(p) for p in (summary_path, rounds_path) if not p.exists()]
    if missing:
        raise MissingArtifactError(f"{run_dir} is not a finished run", missing)
    with summary_path.open("r", encoding="utf-8") as f:
        summary = json.load(f)
    rounds = pd.read_csv(rounds_path, dtype={"client": str})
    return RunRecord(run_dir=run_dir, summary=summary, rounds=rounds)


def _result_rows(run: RunRecord) -> list[dict]:
    paradigm = run.summary["paradigm"]
    label = "isolated (avg)" if paradigm == "isolated" else paradigm
    rows = [{"row": label, "paradigm": paradigm, "seed": run.summary["seed"], **run.summary["final"]}]
    if paradigm == "isolated":
        for client in run.summary["clients"]:
            rows.append(
                {
                    "row": f"isolated client {client['client']}",
                    "paradigm": paradigm,
                    "seed": run.summary["seed"],
                    **client["final"],
                }
            )
    return rows


def comparison_table(runs: Sequence[RunRecord]) -> pd.DataFrame:
    """One row per paradigm (and per isolated client) with mean and std over seeds."""
    if not runs:
        raise MissingArtifactError("no run directories given")
    frame = pd.DataFrame([row for run in runs for row in _result_rows(run)])
    order = {p: i for i, p in enumerate(PARADIGM_ORDER)}
    frame["_order"] = frame["paradigm"].map(order)
    grouped = frame.groupby(["_order", "row"], sort=True)
    table = grouped[list(METRICS)].agg(["mean", "std"])
    table.columns = [f"{metric}_{stat}" for metric, stat in table.columns]
    table = table.fillna(0.0)
    table.insert(0, "n_runs", grouped.size())
    table = table.reset_index().drop(columns="_order")
    return table


def format_table(table: pd.DataFrame) -> str:
    lines = ["row | n | " + " | ".join(m.capitalize() for m in METRICS)]
    for _, row in table.iterrows():
        cells = [f"{row[f'{m}_mean']:.3f} ± {row[f'{m}_std']:.3f}" for m in METRICS]
        lines.append(f"{row['row']} | {int(row['n_runs'])} | " + " | ".join(cells))
    return "\n".join(lines)


def training_curves(runs: Sequence[RunRecord]) -> pd.DataFrame:
    """Per-round test curves of every run, seed column added."""
    frames = []
    for run in runs:
        rounds = run.rounds.copy()
        rounds.insert(2, "seed", run.summary["seed"])
        frames.append(rounds[["paradigm", "client", "seed", "round", "loss", "dice", "lr"]])
    curves = pd.concat(frames, ignore_index=True)
    return curves.sort_values(["paradigm", "client", "seed", "round"], kind="stable").reset_index(
        drop=True
    )
