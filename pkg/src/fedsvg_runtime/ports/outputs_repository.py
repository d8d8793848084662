from __future__ import annotations

from pathlib import Path
from typing import Iterable, Protocol, Sequence

import pandas as pd

from fedsvg_runtime.domain.explain.models import ModalityAttention, StatReport
from fedsvg_runtime.domain.federation.models import RoundReport
from fedsvg_runtime.domain.model.attention import CaseAttention
from fedsvg_runtime.domain.tensor_autodiff.params import ParamStore


class OutputsRepository(Protocol):
    run_dir: Path
    written: list[Path]

    def write_rounds(self, reports: Iterable[RoundReport]) -> str: ...

    def write_summary(self, summary: dict) -> str: ...

    def write_checkpoint(self, params: ParamStore, name: str) -> str: ...

    def write_manifest(self, manifest: dict) -> str: ...

    def write_table(self, frame: pd.DataFrame, name: str) -> str: ...

    def write_attention(self, cases: Sequence[CaseAttention]) -> str: ...

    def write_modality_attention(self, cases: Sequence[ModalityAttention]) -> str: ...

    def write_stat_report(self, report: StatReport) -> str: ...

    def write_dump(self, name: str, payload: dict) -> str: ...
