"""Tests for input validators."""
from fractions import Fraction

import pytest

from utils.validators import (
    CatalogError, JLBError, ParseError, StructuralError, UndeclaredNameError, UnknownLabelError,
    ValidationResult,
    validate_format, validate_mode, validate_param_binding, validate_rational, validate_side,
    validate_square,
    DIFFERENTIAL_MODES, RECORD_STATUSES, SIDES,
)


# ── Individual Validators ──────────────────────────────────────────────


class TestValidateSide:
    def test_valid_side(self):
        assert validate_side("primal") == "primal"

    def test_case_insensitive(self):
        assert validate_side("  Dual ") == "dual"

    def test_invalid_side(self):
        with pytest.raises(StructuralError) as exc:
            validate_side("left", field="brackets.dat:4")
        assert exc.value.field == "brackets.dat:4"

    def test_none(self):
        with pytest.raises(StructuralError):
            validate_side(None)


class TestValidateMode:
    def test_all_modes(self):
        for mode in DIFFERENTIAL_MODES:
            assert validate_mode(mode) == mode

    def test_invalid_mode(self):
        with pytest.raises(StructuralError):
            validate_mode("delta")


class TestValidateFormat:
    def test_default_json(self):
        assert validate_format(None) == "json"

    def test_markdown_to_stdout(self):
        assert validate_format("Markdown") == "markdown"

    def test_xlsx_needs_out(self):
        with pytest.raises(JLBError):
            validate_format("xlsx")
        assert validate_format("xlsx", "report.xlsx") == "xlsx"

    def test_unknown_format(self):
        with pytest.raises(JLBError):
            validate_format("csv", "report.csv")


class TestValidateRational:
    def test_integer(self):
        assert validate_rational("3") == 3

    def test_fraction(self):
        assert validate_rational("-5/3") == Fraction(-5, 3)

    def test_decimal_is_exact(self):
        assert validate_rational("0.25") == Fraction(1, 4)

    def test_passthrough(self):
        assert validate_rational(Fraction(2, 7)) == Fraction(2, 7)
        assert validate_rational(4) == 4

    def test_malformed(self):
        with pytest.raises(CatalogError):
            validate_rational("b/2")

    def test_zero_denominator(self):
        with pytest.raises(CatalogError):
            validate_rational("1/0")


class TestValidateParamBinding:
    def test_valid_binding(self):
        assert validate_param_binding("b=3, a=1/2") == {"b": 3, "a": Fraction(1, 2)}

    def test_empty(self):
        assert validate_param_binding(None) == {}
        assert validate_param_binding("") == {}

    def test_missing_equals(self):
        with pytest.raises(CatalogError):
            validate_param_binding("b3")

    def test_bad_name(self):
        with pytest.raises(CatalogError):
            validate_param_binding("1b=3")

    def test_field_names_the_parameter(self):
        with pytest.raises(CatalogError) as exc:
            validate_param_binding("a=1,b=x")
        assert exc.value.field == "params.b"


class TestValidateSquare:
    def test_square(self):
        rows = ((1, 0), (0, 1))
        assert validate_square(rows, 2) is rows

    def test_wrong_dimension(self):
        with pytest.raises(StructuralError):
            validate_square(((1, 0), (0, 1)), 3)

    def test_ragged(self):
        with pytest.raises(StructuralError):
            validate_square(((1, 0), (0,)), 2)


# ── Exceptions & Result Container ──────────────────────────────────────


class TestErrors:
    def test_fields_and_message(self):
        err = CatalogError("label", "no catalog row")
        assert err.field == "label"
        assert err.message == "no catalog row"
        assert str(err) == "label: no catalog row"

    def test_hierarchy(self):
        assert issubclass(UnknownLabelError, CatalogError)
        assert issubclass(UndeclaredNameError, ParseError)
        for cls in (StructuralError, ParseError, CatalogError):
            assert issubclass(cls, JLBError)


class TestValidationResult:
    def test_empty_is_valid(self):
        result = ValidationResult()
        assert result.is_valid
        assert len(result) == 0
        result.raise_if_invalid()

    def test_collects_errors(self):
        result = ValidationResult()
        result.add_error("alpha_beta", "pairing is 1")
        result.add_error("alpha_fdual", "residual 2")
        assert not result.is_valid
        assert len(result) == 2
        assert result.messages() == ["alpha_beta: pairing is 1", "alpha_fdual: residual 2"]
        assert [e.field for e in result] == ["alpha_beta", "alpha_fdual"]

    def test_raise_joins_messages(self):
        result = ValidationResult()
        result.add_error("a", "one")
        result.add_error("b", "two")
        with pytest.raises(CatalogError) as exc:
            result.raise_if_invalid(CatalogError)
        assert exc.value.field == "a"
        assert "b: two" in exc.value.message

    def test_default_error_class(self):
        result = ValidationResult()
        result.add_error("x", "bad")
        with pytest.raises(StructuralError):
            result.raise_if_invalid()


class TestEnums:
    def test_sides(self):
        assert SIDES == {"primal", "dual"}

    def test_statuses(self):
        assert "flagged" in RECORD_STATUSES
