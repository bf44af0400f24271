"""Tests for the defining equations, row instantiation and parameter sampling."""
from fractions import Fraction

import pytest

from models.bialgebra import JacobiLieBialgebra
from models.lie import LieAlgebra
from repositories.bialgebra_repo import get_entry, load_catalog
from services.bialgebra_service import (
    CONDITIONS, condition_residuals, dual_ref, instantiate, is_valid, sample_bindings,
    sample_parameters, verify_bialgebra_conditions,
)
from utils.validators import CatalogError


class TestDefiningEquations:
    @pytest.mark.parametrize("entry", load_catalog(), ids=lambda e: e.label)
    def test_every_row_is_a_bialgebra(self, entry):
        for instance in sample_parameters(entry, 3, seed=17):
            residuals = verify_bialgebra_conditions(instance.bialgebra)
            assert set(residuals) == set(CONDITIONS)
            assert not any(residuals.values()), (instance.binding, residuals)

    def test_pairing_must_vanish(self):
        g = LieAlgebra.abelian(2)
        b = JacobiLieBialgebra(g=g, dual=g, alpha=(Fraction(1), Fraction(0)),
                               beta=(Fraction(1), Fraction(0)))
        assert condition_residuals(b)["alpha_beta"] == {(): 1}
        assert not is_valid(b)

    def test_x0_must_be_a_dual_cocycle(self):
        g = LieAlgebra.abelian(2)
        dual = LieAlgebra.from_constants("A2", 2, {(0, 1, 0): 1})
        b = JacobiLieBialgebra(g=g, dual=dual, alpha=(Fraction(1), Fraction(0)),
                               beta=(Fraction(0), Fraction(0)))
        assert verify_bialgebra_conditions(b)["alpha_fdual"] == 1


class TestInstantiation:
    def test_printed_values(self, instance_of):
        instance = instance_of("((II,0),(V,bX1))", b=3, rp1=1)
        assert instance.bialgebra.alpha == (3, 0, 0)
        assert instance.r.entry(1, 2) == -4
        assert instance.rdual.entry(1, 2) == Fraction(1, 5)
        assert instance.r.entry(0, 1) == 1 and instance.r.entry(0, 2) == 0

    def test_excluded_value(self, instance_of):
        with pytest.raises(CatalogError):
            instance_of("((II,0),(V,bX1))", b=-2)

    def test_unbound_parameter(self, instance_of):
        with pytest.raises(CatalogError):
            instance_of("((II,0),(V,bX1))")

    def test_algebra_constraint(self, instance_of):
        entry = next(e for e in load_catalog() if e.primal == "VI_a")
        with pytest.raises(CatalogError):
            instantiate(entry, {"a": Fraction(1), **{p: Fraction(1) for p in entry.params if p != "a"}})

    def test_dual_reference_carries_renames(self):
        entry = next(e for e in load_catalog() if e.dual_rename)
        assert dual_ref(entry).endswith("]")


class TestSampling:
    def test_deterministic(self):
        entry = get_entry("((II,0),(V,bX1))")
        assert sample_bindings(entry, 4, seed=9) == sample_bindings(entry, 4, seed=9)
        assert sample_bindings(entry, 4, seed=9) != sample_bindings(entry, 4, seed=10)

    def test_stays_away_from_excluded_points(self):
        entry = get_entry("((II,0),(V,bX1))")
        for binding in sample_bindings(entry, 25, seed=1):
            assert abs(binding["b"] + 2) >= Fraction(1, 4)

    def test_row_without_parameters_gives_one_binding(self):
        entry = get_entry("((A1,X~1),(A1,X2))")
        assert sample_bindings(entry, 5, seed=1) == [{}]

    def test_r_parameters_can_stay_at_zero(self):
        entry = get_entry("((II,0),(I,X1))")
        binding = sample_bindings(entry, 1, seed=4, sample_rparams=False)[0]
        assert binding == {"rp1": 0, "rp2": 0}

    def test_count_must_be_positive(self):
        with pytest.raises(CatalogError):
            sample_bindings(get_entry("((II,0),(V,bX1))"), 0, seed=1)
