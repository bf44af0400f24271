"""Tests for report rendering."""
import io
import json

import pandas as pd
import pytest

from models.report import Report, TaskRecord
from services import report_service


@pytest.fixture
def report():
    report = Report(seed=7, command="verify", elapsed_ms=12.5)
    report.extend([
        TaskRecord(label="((II,0),(V,bX1))", task="classify", side="primal", binding="b=3",
                   status="flagged", residuals={"residue_mismatch": 16.0},
                   objects={"kind": "Quasitriangular"}, notes=["printed residue is marked inconsistent"]),
        TaskRecord(label="((A1,X~1),(A1,X2))", task="coboundary", side="primal",
                   residuals={"max_residual": 0.0}),
    ])
    return report


class TestJson:
    def test_stable_output_drops_timing(self, report):
        payload = json.loads(report_service.to_json(report))
        assert "elapsed_ms" not in payload
        assert payload["tool"] == "jlbialg"
        assert payload["seed"] == 7
        assert [r["status"] for r in payload["records"]] == ["flagged", "pass"]

    def test_identical_runs_render_identically(self, report):
        again = report.model_copy(update={"elapsed_ms": 99.0})
        assert report_service.to_json(report) == report_service.to_json(again)

    def test_unstable_keeps_timing(self, report):
        assert report_service.to_payload(report, stable=False)["elapsed_ms"] == 12.5


class TestMarkdown:
    def test_sections_and_footer(self, report):
        text = report_service.to_markdown(report)
        assert text.startswith("# jlbialg 1.0.0: verify")
        assert "## Classification of r-matrices" in text
        assert "## Coboundary equation for printed r-matrices" in text
        assert "FLAGGED" in text
        assert text.rstrip().endswith("**2 records, 0 failed**")

    def test_residuals_are_compact(self, report):
        frames = report_service.to_dataframes(report)
        row = frames["Classification of r-matrices"].iloc[0]
        assert row["residuals"] == "residue_mismatch=16"


class TestFiles:
    def test_xlsx_has_one_sheet_per_task(self, report):
        data = report_service.render(report, "xlsx")
        sheets = pd.read_excel(io.BytesIO(data), sheet_name=None)
        assert len(sheets) == 2
        first = next(iter(sheets.values()))
        assert "Label" in first.columns

    def test_empty_report_still_writes_a_workbook(self):
        data = report_service.render(Report(seed=1, command="verify"), "xlsx")
        assert data[:2] == b"PK"

    def test_write_to_file(self, report, tmp_path):
        path = report_service.write(report, "markdown", str(tmp_path / "out" / "report.md"))
        assert path.read_text(encoding="utf-8") == report_service.to_markdown(report)

    def test_stdout_means_no_file(self, report):
        assert report_service.write(report, "json", None) is None

    def test_flat_frame(self, report):
        df = report_service.to_dataframe(report)
        assert list(df["task"]) == ["classify", "coboundary"]
