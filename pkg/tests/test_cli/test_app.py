"""Smoke tests for the command-line surface."""
import json

import pytest

from app import build_parser, main
from utils.error_boundary import EXIT_OK, EXIT_USAGE

V_ROW = "((II,0),(V,bX1))"


class TestParser:
    def test_global_flags_follow_the_subcommand(self):
        args = build_parser().parse_args(["classify", V_ROW, "--params", "b=3", "--seed", "5"])
        assert args.command == "classify"
        assert args.seed == 5 and args.params == "b=3"

    def test_equiv_requires_a_matrix(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["equiv", V_ROW, V_ROW])

    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_USAGE


class TestCommands:
    def test_describe(self, capsys):
        assert main(["describe", "V"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["command"] == "describe"
        assert payload["records"][0]["label"] == "V"

    def test_unknown_label_is_a_usage_error(self, capsys):
        assert main(["solve-r", "nonexistent"]) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_flagged_rows_do_not_fail(self, capsys):
        assert main(["classify", V_ROW, "--params", "b=3"]) == EXIT_OK
        records = json.loads(capsys.readouterr().out)["records"]
        assert [r["status"] for r in records if r["side"] == "primal"] == ["flagged"]

    def test_valid_structure_passes_axioms(self, capsys):
        assert main(["axioms", "((A1,X~1),(A1,X2))", "--samples", "20"]) == EXIT_OK
        records = json.loads(capsys.readouterr().out)["records"]
        assert {r["status"] for r in records} == {"pass"}

    def test_bad_binding(self):
        assert main(["classify", V_ROW, "--params", "b"]) == EXIT_USAGE

    def test_brackets_needs_a_label(self):
        assert main(["brackets"]) == EXIT_USAGE

    def test_xlsx_needs_out(self):
        assert main(["describe", "II", "--format", "xlsx"]) == EXIT_USAGE

    def test_markdown(self, capsys):
        assert main(["describe", "IX", "--format", "markdown"]) == EXIT_OK
        assert "## Lie algebra" in capsys.readouterr().out

    def test_report_file(self, tmp_path, capsys):
        out = tmp_path / "describe.xlsx"
        assert main(["describe", "II", "--format", "xlsx", "--out", str(out)]) == EXIT_OK
        assert out.read_bytes()[:2] == b"PK"
        assert capsys.readouterr().out == ""

    def test_output_is_stable(self, capsys):
        argv = ["verify-catalog", "((II,0),(I,X1))", "--seed", "3"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first
