"""Tests for the phase-space realisation and its constants of motion."""
from fractions import Fraction

import pytest

from models.bialgebra import JacobiLieBialgebra
from models.lie import LieAlgebra
from services.integrable_service import (
    check_alpha_independence, check_footnote_condition, check_involution, check_invariant_formula,
    check_S_relations, coefficients, conserved_check, conserved_functions, constants_of_motion,
    gcybe_violation, hamiltonian, load_system, perturbed,
)
from services.symexpr_service import evaluate, sympy_symbol
from utils.validators import StructuralError, UnknownLabelError

SYSTEM = "V-V.i-plane"


@pytest.fixture
def system():
    return load_system(SYSTEM)


class TestRealisation:
    def test_relations_hold_exactly(self, system):
        report = check_S_relations(system, samples=20, seed=1)
        assert report.ok
        assert report.max_residual < 1e-12

    def test_first_coefficient(self, system):
        # c_1 = -S2 - S3 for r = X12 + X13 + rp1 X23
        c1 = coefficients(system)[0]
        assert c1.subs({sympy_symbol("y"): 2, sympy_symbol("px"): 3}) == 9

    def test_footnote_violation(self):
        g = LieAlgebra.from_constants("II", 3, {(1, 2, 0): 1})
        b = JacobiLieBialgebra(g=g, dual=LieAlgebra.abelian(3), alpha=(Fraction(0),) * 3,
                               beta=(Fraction(1), Fraction(0), Fraction(0)))
        assert not check_footnote_condition(b).is_valid

    def test_unknown_system(self):
        with pytest.raises(UnknownLabelError):
            load_system("nope")


class TestConstantsOfMotion:
    def test_closed_form(self, system):
        I = constants_of_motion(system, 4)
        assert all(check_invariant_formula(system, I).values())
        env = {"x": 0.3, "y": 0.5, "px": -1.2, "py": 0.4}
        for n, value in enumerate(I, start=1):
            assert evaluate(value, env) == pytest.approx(2 * (1.5 * -1.2) ** n)

    def test_independent_of_free_r_parameters(self, system):
        assert system.rparams
        assert check_alpha_independence(constants_of_motion(system, 4), system.rparams)

    def test_involution(self, system):
        I = constants_of_motion(system, 4)
        assert check_involution(system.phase, I, samples=20, seed=2) < 1e-9

    def test_hamiltonian_conserves_declared_functions(self, system):
        H = hamiltonian(system)
        declared = conserved_functions(system)
        assert set(declared) == {"S3"}
        assert all(conserved_check(system, H, f) for f in declared.values())

    def test_perturbed_r_breaks_the_closed_form(self, system):
        moved = perturbed(system, 0, 1, 1)
        I = constants_of_motion(moved, 2)
        assert not all(check_invariant_formula(moved, I).values())

    def test_k_max_must_be_positive(self, system):
        with pytest.raises(StructuralError):
            constants_of_motion(system, 0)


class TestYangBaxter:
    def test_generalized_equation_holds(self, system):
        assert gcybe_violation(system, samples=20, seed=3) < 1e-9
