from __future__ import annotations

from dataclasses import dataclass
from typing import NewType

CaseId = NewType("CaseId", str)
ClientId = NewType("ClientId", int)


@dataclass(frozen=True)
class RunId:
    value: str
