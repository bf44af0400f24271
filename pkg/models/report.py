"""
Report models
=============
One ``TaskRecord`` per (task, row, side, binding); a ``Report`` collects the
records of one CLI command in catalog order.
"""

from typing import Dict, List

from pydantic import BaseModel, Field, field_validator

from utils.validators import RECORD_STATUSES

TOOL_NAME = "jlbialg"
TOOL_VERSION = "1.0.0"


class TaskRecord(BaseModel):
    label: str
    task: str
    side: str = "-"
    binding: str = "-"
    status: str = "pass"
    residuals: Dict[str, float] = Field(default_factory=dict)
    objects: Dict[str, str] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)

    @field_validator("status")
    @classmethod
    def _known_status(cls, value: str) -> str:
        if value not in RECORD_STATUSES:
            raise ValueError(f"status must be one of {sorted(RECORD_STATUSES)}")
        return value

    @property
    def failed(self) -> bool:
        return self.status == "fail"


class Report(BaseModel):
    tool: str = TOOL_NAME
    version: str = TOOL_VERSION
    schema_version: str = "1"
    seed: int
    command: str
    records: List[TaskRecord] = Field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return not any(r.failed for r in self.records)

    @property
    def failures(self) -> List[TaskRecord]:
        return [r for r in self.records if r.failed]

    def extend(self, records) -> None:
        self.records.extend(records)
