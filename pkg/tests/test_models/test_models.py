"""Tests for the value types shared across services."""
from fractions import Fraction

import pytest
import sympy
from pydantic import ValidationError

from models.lie import LieAlgebra
from models.multivector import Multivector, sort_with_sign
from models.report import Report, TaskRecord
from models.rmatrix import RMatrix
from utils.validators import StructuralError

G = LieAlgebra.abelian(3)


class TestMultivector:
    def test_permutation_sign(self):
        assert sort_with_sign((2, 0, 1)) == (1, (0, 1, 2))
        assert sort_with_sign((1, 0)) == (-1, (0, 1))
        assert sort_with_sign((1, 1)) == (0, ())

    def test_zero_coefficients_are_dropped(self):
        P = Multivector(G, "primal", 2, {(0, 1): 0, (1, 2): Fraction(1, 2)})
        assert dict(P.components) == {(1, 2): Fraction(1, 2)}

    def test_unsorted_key_rejected(self):
        with pytest.raises(StructuralError):
            Multivector(G, "primal", 2, {(1, 0): 1})

    def test_index_out_of_range(self):
        with pytest.raises(StructuralError):
            Multivector(G, "primal", 1, {(3,): 1})

    def test_from_terms_accumulates_signs(self):
        P = Multivector.from_terms(G, "primal", 2, {(1, 0): 2, (0, 1): 3})
        assert P.coefficient(0, 1) == 1
        assert P.coefficient(1, 0) == -1

    def test_mixed_sides_cannot_add(self):
        with pytest.raises(StructuralError):
            Multivector.basis(G, "primal", 0) + Multivector.basis(G, "dual", 0)

    def test_rendering(self):
        P = Multivector.from_terms(G, "dual", 2, {(0, 1): Fraction(-1, 2), (0, 2): 1})
        assert str(P) == "-1/2 X~1^X~2 + X~1^X~3"
        assert str(Multivector.zero(G, "primal", 3)) == "0"

    def test_scalar_value(self):
        assert Multivector.scalar(G, "primal", 4).value == 4
        with pytest.raises(StructuralError):
            Multivector.basis(G, "primal", 0).value


class TestRMatrix:
    def test_from_upper(self):
        r = RMatrix.from_upper("primal", 3, {(0, 1): 1, (1, 2): Fraction(-3, 2)})
        assert r.entry(1, 0) == -1
        assert r.upper() == (1, 0, Fraction(-3, 2))

    def test_not_antisymmetric(self):
        with pytest.raises(StructuralError):
            RMatrix("primal", sympy.ImmutableMatrix([[0, 1], [1, 0]]))

    def test_diagonal_entry(self):
        with pytest.raises(StructuralError):
            RMatrix.from_upper("primal", 2, {(1, 1): 1})

    def test_bivector_conversion(self):
        r = RMatrix.from_upper("dual", 3, {(0, 2): 5})
        P = r.to_bivector(G)
        assert P.side == "dual" and P.coefficient(0, 2) == 5
        assert RMatrix.from_bivector(P) == r

    def test_arithmetic(self):
        r = RMatrix.from_upper("primal", 2, {(0, 1): 2})
        assert (r - r.scaled(Fraction(1, 2))).entry(0, 1) == 1
        assert (r - r).is_zero()
        with pytest.raises(StructuralError):
            r + RMatrix.zero("dual", 2)


class TestReport:
    def test_status_is_validated(self):
        with pytest.raises(ValidationError):
            TaskRecord(label="A1", task="solve", status="maybe")

    def test_ok_ignores_flagged_rows(self):
        report = Report(seed=1, command="verify")
        report.extend([
            TaskRecord(label="a", task="coboundary"),
            TaskRecord(label="b", task="coboundary", status="flagged"),
            TaskRecord(label="c", task="coboundary", status="skip"),
        ])
        assert report.ok
        assert report.failures == []

    def test_failures(self):
        report = Report(seed=1, command="verify",
                        records=[TaskRecord(label="a", task="classify", status="fail")])
        assert not report.ok
        assert [r.label for r in report.failures] == ["a"]
