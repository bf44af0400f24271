"""Tests for the sweeps behind the CLI commands."""
from fractions import Fraction

import pytest

from models.report import TaskRecord
from services import verification_service as vs
from utils.validators import CatalogError, UnknownLabelError

V_ROW = "((II,0),(V,bX1))"


class TestCatalog:
    def test_one_row_records(self):
        records = vs.verify_catalog(V_ROW, params={"b": Fraction(3)})
        assert {r.task for r in records} == {"conditions", "coboundary", "classify"}
        assert all(isinstance(r, TaskRecord) for r in records)
        assert not any(r.failed for r in records)

    def test_misprinted_residue_is_flagged(self):
        record = next(r for r in vs.classify_records(V_ROW, params={"b": Fraction(3)})
                      if r.side == "primal")
        assert record.status == "flagged"
        assert record.objects["residue"] == "-8 X1^X2^X3"
        assert record.objects["kind"] == "Quasitriangular"
        assert record.residuals["residue_mismatch"] == 16.0

    def test_sampling_is_deterministic(self):
        first = vs.verify_catalog("((II,0),(I,X1))", count=2, seed=4)
        second = vs.verify_catalog("((II,0),(I,X1))", count=2, seed=4)
        assert [r.model_dump() for r in first] == [r.model_dump() for r in second]

    def test_unknown_label(self):
        with pytest.raises(UnknownLabelError):
            vs.verify_catalog("((Q,0),(Q,0))")


class TestSolve:
    def test_printed_family_spans_the_solutions(self):
        records = vs.solve_records("((II,0),(I,X1))", side="primal", count=1, seed=2)
        assert len(records) == 1
        assert records[0].status == "pass"
        assert records[0].objects["free_dim"] == "2"

    def test_missing_printed_side_is_skipped(self):
        records = vs.solve_records("((I,0),(III,-2X1))", side="primal", count=1, seed=2)
        assert records[0].status == "skip"


class TestEquivalence:
    def test_identity_relates_a_row_to_itself(self, tmp_path):
        path = tmp_path / "c.dat"
        path.write_text("automorphism id\n  row = 1, 0, 0\n  row = 0, 1, 0\n  row = 0, 0, 1\n",
                        encoding="utf-8")
        record = vs.equivalence_records(V_ROW, V_ROW, path, params={"b": Fraction(3)})[0]
        assert record.status == "pass"
        assert record.objects["equivalent"] == "true"
        assert record.objects["delta"] == "0"

    def test_missing_matrix_file(self, tmp_path):
        with pytest.raises(CatalogError):
            vs.equivalence_records(V_ROW, V_ROW, tmp_path / "absent.dat")


class TestOtherSweeps:
    def test_describe(self):
        record = vs.describe_records("IX")[0]
        assert record.status == "pass"
        assert record.objects["unimodular"] == "true"
        assert set(record.objects) >= {"X1", "X2", "X3", "killing_form"}

    def test_describe_samples_missing_parameters(self):
        record = vs.describe_records("VI_a", seed=3)[0]
        assert record.binding.startswith("a=")

    def test_system_from_a_file(self, tmp_path):
        path = tmp_path / "one.dat"
        path.write_text(
            "system copy\n"
            "  bialgebra = ((V,-2X~1),(V.i,-2X2-2X3))\n"
            "  coords = x, y\n"
            "  momenta = px, py\n"
            "  S1 = -3*x*px\n"
            "  S2 = -y*px\n"
            "  S3 = -px\n"
            "  conserved = S3\n"
            "  invariant = 2*((y+1)*px)^n\n",
            encoding="utf-8",
        )
        assert vs.resolve_system(str(path)).name == "copy"

    def test_integrable_record(self):
        record = vs.integrable_records("V-V.i-plane", k_max=3, samples=10, seed=1)[0]
        assert record.status == "pass", record.notes
        assert {"I1", "I2", "I3", "H"} <= set(record.objects)


class TestAxiomRecords:
    def test_inert_conformal_factor_does_not_fail(self):
        records = vs.axiom_records("((A1,X~1),(A1,X2))", samples=20, seed=3)
        assert [r.side for r in records] == ["primal", "dual"]
        for record in records:
            assert record.status == "pass", record.notes
            assert record.residuals["mutation"] == 0
            assert record.objects["conformal_factor"] == "inert"

    def test_essential_conformal_factor_is_reported(self):
        record = next(r for r in vs.axiom_records("((VI_0,X~3),(III.ix,-X1))", samples=20, seed=3)
                      if r.side == "primal")
        assert record.status == "pass", record.notes
        assert record.residuals["mutation"] > vs.MUTATION_THRESHOLD
        assert record.objects["conformal_factor"] == "essential"
