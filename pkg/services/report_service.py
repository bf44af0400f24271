"""
Report Service
==============
Renders a ``Report`` as stable JSON, Markdown tables or an Excel workbook.

Stable JSON omits timing so that two runs with the same seed produce
byte-identical output.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from models.report import Report, TaskRecord
from services import export_service
from utils.labels import STATUS_LABELS, TASK_TITLES

logger = logging.getLogger(__name__)

COLUMNS = ["label", "side", "binding", "status", "residuals", "objects", "notes"]


def to_payload(report: Report, stable: bool = True) -> dict:
    payload = report.model_dump()
    if stable:
        payload.pop("elapsed_ms", None)
    return payload


def to_json(report: Report, stable: bool = True) -> str:
    return json.dumps(to_payload(report, stable), sort_keys=True, indent=2) + "\n"


def _group(records: List[TaskRecord]) -> Dict[str, List[TaskRecord]]:
    grouped: Dict[str, List[TaskRecord]] = {}
    for rec in records:
        grouped.setdefault(rec.task, []).append(rec)
    return grouped


def _row(rec: TaskRecord) -> dict:
    return {
        "label": rec.label,
        "side": rec.side,
        "binding": rec.binding,
        "status": STATUS_LABELS[rec.status],
        "residuals": "; ".join(f"{k}={v:.3g}" for k, v in sorted(rec.residuals.items())),
        "objects": "; ".join(f"{k}: {v}" for k, v in sorted(rec.objects.items())),
        "notes": "; ".join(rec.notes),
    }


def to_dataframes(report: Report) -> Dict[str, pd.DataFrame]:
    """One frame per task, keyed by its section title."""
    frames = {}
    for task, records in _group(report.records).items():
        frames[TASK_TITLES.get(task, task)] = pd.DataFrame([_row(r) for r in records], columns=COLUMNS)
    return frames


def to_dataframe(report: Report) -> pd.DataFrame:
    rows = [{"task": r.task, **_row(r)} for r in report.records]
    return pd.DataFrame(rows, columns=["task"] + COLUMNS)


def to_markdown(report: Report) -> str:
    lines = [f"# {report.tool} {report.version}: {report.command}", "",
             f"seed: {report.seed}", ""]
    for title, df in to_dataframes(report).items():
        lines.append(f"## {title}")
        lines.append("")
        lines.append(df.to_markdown(index=False, tablefmt="github"))
        lines.append("")
    failures = len(report.failures)
    lines.append(f"**{len(report.records)} records, {failures} failed**")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str) -> bytes:
    if fmt == "json":
        return to_json(report).encode()
    if fmt == "markdown":
        return to_markdown(report).encode()
    return export_service.to_excel(to_dataframes(report))


def write(report: Report, fmt: str, out: Optional[str]) -> Optional[Path]:
    """Write the rendered report to ``out``, or return ``None`` when stdout is meant."""
    if not out:
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(render(report, fmt))
    logger.info("report written to %s (%s)", path, fmt)
    return path
