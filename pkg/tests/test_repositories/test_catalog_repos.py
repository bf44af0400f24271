"""Tests for the shipped catalogs and their loaders."""
from fractions import Fraction

import pytest

from repositories.algebra_repo import algebra_names, get_algebra, parse_algebra_ref, parse_constraints
from repositories.automorphism_repo import load_matrix
from repositories.bialgebra_repo import get_entry, labels, load_catalog
from repositories.bracket_repo import get_brackets, load_brackets
from repositories.chart_repo import chart_names, get_chart
from repositories.system_repo import get_system, load_systems
from utils.validators import CatalogError, ParseError, UnknownLabelError, UnsupportedChartError


class TestAlgebraRepo:
    def test_names(self):
        names = algebra_names()
        assert {"A1", "A2", "II", "V", "VI_a", "IX"} <= set(names)

    def test_constraints(self):
        algebra = get_algebra("VI_a")
        assert algebra.params == ("a",)
        assert [str(c) for c in algebra.constraints] == ["a>0", "a!=1"]

    def test_rename_suffix(self):
        renamed = get_algebra("VI_a.v[a=b]")
        assert renamed.params == ("b",)
        assert all(c.param == "b" for c in renamed.constraints)

    def test_parse_reference(self):
        assert parse_algebra_ref("VI_a.v[a=b]") == ("VI_a.v", {"a": "b"})
        assert parse_algebra_ref("II") == ("II", {})

    def test_malformed_rename(self):
        with pytest.raises(CatalogError):
            parse_algebra_ref("VI_a[a=1]")

    def test_malformed_constraint(self):
        with pytest.raises(ParseError):
            parse_constraints("a=>0", "here")

    def test_unknown(self):
        with pytest.raises(UnknownLabelError):
            get_algebra("XI")

    def test_bad_index(self, tmp_path):
        path = tmp_path / "algebras.dat"
        path.write_text("algebra bad dim=2\nf 2 1 1 1\n", encoding="utf-8")
        with pytest.raises(ParseError):
            algebra_names(path)


class TestBialgebraRepo:
    def test_catalog_size(self):
        assert len(load_catalog()) == 76
        assert len(set(labels())) == 76

    def test_entry_fields(self):
        entry = get_entry("((II,0),(V,bX1))")
        assert entry.params == ("b",)
        assert entry.rparams == ("rp1", "rp2")
        assert entry.excluded == (("b", Fraction(-2)),)
        assert entry.flagged("residue") and not entry.flagged("r")
        assert entry.sides == ("primal", "dual")

    def test_one_sided_row(self):
        assert get_entry("((I,0),(III,-2X1))").sides == ("dual",)

    def test_unknown_label(self):
        with pytest.raises(UnknownLabelError):
            get_entry("((X,0),(Y,0))")

    def test_undeclared_parameter(self, tmp_path):
        path = tmp_path / "bialgebras.dat"
        path.write_text(
            "bialgebra row\n"
            "  group = coboundary\n"
            "  primal = A1\n"
            "  dual = A1\n"
            "  alpha = q, 0\n"
            "  beta = 0, 0\n",
            encoding="utf-8",
        )
        with pytest.raises(CatalogError):
            load_catalog(path)

    def test_unknown_group(self, tmp_path):
        path = tmp_path / "bialgebras.dat"
        path.write_text(
            "bialgebra row\n  group = other\n  primal = A1\n  dual = A1\n  alpha = 0, 0\n  beta = 0, 0\n",
            encoding="utf-8",
        )
        with pytest.raises(CatalogError):
            load_catalog(path)


class TestGeometryRepos:
    def test_every_chart_has_an_algebra(self):
        names = set(algebra_names())
        assert set(chart_names()) <= names

    def test_chart_rename(self):
        assert get_chart("VI_a[a=b]").params == ("b",)

    def test_missing_chart(self):
        with pytest.raises(UnsupportedChartError):
            get_chart("IX")

    def test_golden_rows(self):
        rows = load_brackets()
        assert len(rows) == 119
        flagged = get_brackets("((III,bX~1),(III.i,-X2+X3))", "primal")[0]
        assert flagged.flagged(("y", "z"))

    def test_system(self):
        assert [s.name for s in load_systems()] == ["V-V.i-plane"]
        spec = get_system("V-V.i-plane")
        assert spec.coords == ("x", "y") and spec.momenta == ("px", "py")
        assert spec.hamiltonian == 2 and spec.conserved == ("S3",)


class TestAutomorphismRepo:
    def test_single_matrix(self, tmp_path):
        path = tmp_path / "c.dat"
        path.write_text("automorphism flip\n  row = 0, 1\n  row = 1, 0\n", encoding="utf-8")
        assert load_matrix(path) == ((0, 1), (1, 0))

    def test_named_matrix(self, tmp_path):
        path = tmp_path / "c.dat"
        path.write_text(
            "automorphism one\n  row = 1, 0\n  row = 0, 1\n"
            "automorphism half\n  row = 1/2, 0\n  row = 0, 2\n",
            encoding="utf-8",
        )
        assert load_matrix(path, "half")[0][0] == Fraction(1, 2)
        with pytest.raises(CatalogError):
            load_matrix(path)
        with pytest.raises(CatalogError):
            load_matrix(path, "third")

    def test_not_square(self, tmp_path):
        path = tmp_path / "c.dat"
        path.write_text("automorphism bad\n  row = 1, 0, 0\n  row = 0, 1, 0\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_matrix(path)
