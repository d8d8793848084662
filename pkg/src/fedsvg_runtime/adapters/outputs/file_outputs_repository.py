from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence

import jsonschema
import pandas as pd

from fedsvg_runtime.domain.explain.models import ModalityAttention, StatReport
from fedsvg_runtime.domain.federation.models import ROUND_COLUMNS, RoundReport
from fedsvg_runtime.domain.model.attention import CaseAttention, write_attention
from fedsvg_runtime.domain.tensor_autodiff.checkpoint import write_checkpoint
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore
from fedsvg_runtime.domain.volume_forge.config import MODALITIES
from fedsvg_runtime.ports.outputs_repository import OutputsRepository
from fedsvg_runtime.settings import get_settings

logger = logging.getLogger(__name__)

SUMMARY_SCHEMA = "run_summary.schema.json"
STAT_REPORT_SCHEMA = "stat_report.schema.json"


def load_schema(name: str, schemas_dir: Optional[str] = None) -> dict:
    path = Path(schemas_dir or get_settings().schemas_dir) / name
    with path.open("r", encoding="utf-8") as f:
        return json.load(f)


class FileOutputsRepository(OutputsRepository):
    """Writes every artifact of one command into a run directory."""

    def __init__(self, run_dir: str | Path, schemas_dir: Optional[str] = None) -> None:
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.schemas_dir = schemas_dir
        self.written: list[Path] = []

    def _track(self, path: Path) -> str:
        if path not in self.written:
            self.written.append(path)
        return str(path)

    def _write_json(self, name: str, payload: dict) -> str:
        path = self.run_dir / name
        with path.open("w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        return self._track(path)

    def write_rounds(self, reports: Iterable[RoundReport]) -> str:
        frame = pd.DataFrame([r.as_row() for r in reports], columns=list(ROUND_COLUMNS))
        return self.write_table(frame, "rounds.csv")

    def write_summary(self, summary: dict) -> str:
        jsonschema.validate(instance=summary, schema=load_schema(SUMMARY_SCHEMA, self.schemas_dir))
        return self._write_json("summary.json", summary)

    def write_checkpoint(self, params: ParamStore, name: str) -> str:
        path = self.run_dir / name
        write_checkpoint(params, path)
        return self._track(path)

    def write_manifest(self, manifest: dict) -> str:
        return self._write_json("run_manifest.json", manifest)

    def write_table(self, frame: pd.DataFrame, name: str) -> str:
        path = self.run_dir / name
        frame.to_csv(path, index=False, float_format="%.8g", lineterminator="\n")
        return self._track(path)

    def write_attention(self, cases: Sequence[CaseAttention]) -> str:
        path = self.run_dir / "attention.att1"
        write_attention(cases, path)
        return self._track(path)

    def write_modality_attention(self, cases: Sequence[ModalityAttention]) -> str:
        rows = [
            {"case_id": case.case_id, "layer": layer, **dict(zip(MODALITIES, case.values[layer]))}
            for case in cases
            for layer in range(case.n_layers)
        ]
        frame = pd.DataFrame(rows, columns=["case_id", "layer", *MODALITIES])
        return self.write_table(frame, "modality_attention.csv")

    def write_stat_report(self, report: StatReport) -> str:
        payload = report.model_dump(mode="json")
        jsonschema.validate(instance=payload, schema=load_schema(STAT_REPORT_SCHEMA, self.schemas_dir))
        return self._write_json("stat_report.json", payload)

    def write_dump(self, name: str, payload: dict) -> str:
        return self._write_json(name, payload)
