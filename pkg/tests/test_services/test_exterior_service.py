"""Tests for wedge, contraction, the Schouten bracket and the differentials."""
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from models.lie import LieAlgebra
from models.multivector import Multivector
from repositories.algebra_repo import algebra_names
from repositories.bialgebra_repo import load_catalog
from services.bialgebra_service import sample_parameters
from services.exterior_service import (
    ce_differential, check_coboundary_differential, check_cocycles, contract, d_squared,
    interior_x0, pair, schouten, schouten_modified, wedge,
)
from utils.validators import StructuralError

THREE_DIM = {
    "II": {(1, 2, 0): 1},
    "V": {(0, 1, 1): -1, (0, 2, 2): -1},
    "VI_0": {(0, 2, 1): 1, (1, 2, 0): 1},
    "VIII": {(0, 1, 2): -1, (0, 2, 1): -1, (1, 2, 0): 1},
    "IX": {(0, 1, 2): 1, (0, 2, 1): -1, (1, 2, 0): 1},
}

coefficients = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def multivectors(draw, space, min_degree=1):
    degree = draw(st.integers(min_degree, space.dim))
    keys = list(combinations(range(space.dim), degree))
    values = draw(st.lists(coefficients, min_size=len(keys), max_size=len(keys)))
    return Multivector(space, "primal", degree, dict(zip(keys, values)))


@st.composite
def algebra_and_triple(draw):
    name = draw(st.sampled_from(sorted(THREE_DIM)))
    g = LieAlgebra.from_constants(name, 3, THREE_DIM[name])
    return g, draw(multivectors(g)), draw(multivectors(g)), draw(multivectors(g))


class TestWedgeAndContraction:
    def test_basis_wedge(self):
        g = LieAlgebra.abelian(3)
        X1, X2 = Multivector.basis(g, "primal", 0), Multivector.basis(g, "primal", 1)
        assert wedge(X2, X1) == Multivector.basis(g, "primal", 0, 1) * -1

    def test_wedge_overflows_to_zero(self):
        g = LieAlgebra.abelian(3)
        top = Multivector.basis(g, "primal", 0, 1, 2)
        assert wedge(top, Multivector.basis(g, "primal", 0)).is_zero()

    def test_mixed_sides(self):
        g = LieAlgebra.abelian(2)
        with pytest.raises(StructuralError):
            wedge(Multivector.basis(g, "primal", 0), Multivector.basis(g, "dual", 1))

    def test_pairing(self):
        g = LieAlgebra.abelian(3)
        phi = Multivector.vector(g, "dual", (1, 2, 3))
        X = Multivector.vector(g, "primal", (1, 0, -1))
        assert pair(phi, X) == -2

    def test_contract_into_bivector(self):
        g = LieAlgebra.abelian(3)
        phi = Multivector.basis(g, "dual", 1)
        P = Multivector.basis(g, "primal", 0, 1)
        assert contract(phi, P) == Multivector.basis(g, "primal", 0) * -1

    def test_x0_contracts_dual_multivectors(self, instance_of):
        b = instance_of("((II,0),(V,bX1))", b=3).bialgebra
        Q = Multivector.basis(b.dual, "dual", 0, 1)
        assert interior_x0(b, Q) == Multivector.basis(b.dual, "dual", 1) * 3

    def test_contract_scalar_rejected(self):
        g = LieAlgebra.abelian(2)
        with pytest.raises(StructuralError):
            contract(Multivector.basis(g, "dual", 0), Multivector.scalar(g, "primal", 1))

    @given(algebra_and_triple())
    def test_graded_commutativity(self, data):
        _, P, Q, _ = data
        assert wedge(P, Q) == wedge(Q, P) * (-1) ** (P.degree * Q.degree)

    @given(algebra_and_triple(), st.lists(coefficients, min_size=3, max_size=3))
    def test_contraction_is_an_antiderivation(self, data, phi_coeffs):
        g, P, Q, _ = data
        phi = Multivector.vector(g, "dual", phi_coeffs)
        lhs = contract(phi, wedge(P, Q))
        rhs = wedge(contract(phi, P), Q) + wedge(P, contract(phi, Q)) * (-1) ** P.degree
        assert lhs == rhs


class TestSchouten:
    def test_vectors_bracket_like_the_algebra(self):
        g = LieAlgebra.from_constants("V", 3, THREE_DIM["V"])
        X1, X2 = Multivector.basis(g, "primal", 0), Multivector.basis(g, "primal", 1)
        assert schouten(X1, X2) == X2 * -1

    def test_scalars_bracket_to_zero(self):
        g = LieAlgebra.from_constants("II", 3, THREE_DIM["II"])
        assert schouten(Multivector.scalar(g, "primal", 5), Multivector.basis(g, "primal", 1, 2)).is_zero()

    @given(algebra_and_triple())
    def test_graded_antisymmetry(self, data):
        _, P, Q, _ = data
        assert schouten(P, Q) == schouten(Q, P) * (-1) ** (P.degree * Q.degree)

    @given(algebra_and_triple())
    def test_graded_leibniz_rule(self, data):
        _, P, Q, R = data
        k, k1 = P.degree, Q.degree
        lhs = schouten(P, wedge(Q, R))
        rhs = wedge(schouten(P, Q), R) + wedge(Q, schouten(P, R)) * (-1) ** (k1 * (k + 1))
        assert lhs == rhs

    @given(algebra_and_triple())
    def test_graded_jacobi_identity(self, data):
        _, P, Q, R = data
        k, k1, k2 = P.degree, Q.degree, R.degree
        total = (schouten(schouten(P, Q), R) * (-1) ** (k * k2)
                 + schouten(schouten(R, P), Q) * (-1) ** (k1 * k2)
                 + schouten(schouten(Q, R), P) * (-1) ** (k * k1))
        assert total.is_zero()

    def test_primal_modified_bracket_subtracts_the_cocycle(self):
        g = LieAlgebra.abelian(2)
        phi0 = Multivector.vector(g, "dual", (1, 0))
        X1 = Multivector.basis(g, "primal", 0)
        r = Multivector.basis(g, "primal", 0, 1)
        assert schouten_modified(X1, r, phi0, "primal") == r * -1

    def test_modified_bracket_needs_a_vector(self):
        g = LieAlgebra.abelian(2)
        phi0 = Multivector.vector(g, "dual", (1, 0))
        r = Multivector.basis(g, "primal", 0, 1)
        with pytest.raises(StructuralError):
            schouten_modified(r, r, phi0, "primal")


class TestDifferentials:
    @pytest.mark.parametrize("name", algebra_names())
    def test_d_squared_vanishes(self, name, sampled_algebra):
        assert d_squared(sampled_algebra(name)).is_valid

    def test_d_squared_with_parameter(self, algebra_of):
        assert d_squared(algebra_of("VI_a", a=Fraction(3, 2))).is_valid

    def test_d_squared_detects_a_non_lie_bracket(self):
        broken = LieAlgebra.from_constants("broken", 3, {(0, 1, 0): 1, (1, 2, 1): 1, (0, 2, 2): 1})
        assert not d_squared(broken).is_valid

    def test_mode_must_match_side(self, instance_of):
        b = instance_of("((II,0),(I,X1))").bialgebra
        with pytest.raises(StructuralError):
            ce_differential(b.phi0, "d_star", b)

    def test_d_star_x0_adds_the_cocycle(self, instance_of):
        b = instance_of("((II,0),(I,X1))").bialgebra
        X2 = Multivector.basis(b.g, "primal", 1)
        assert ce_differential(X2, "d_star_X0", b) == Multivector.basis(b.g, "primal", 0, 1)

    @pytest.mark.parametrize("entry", load_catalog(), ids=lambda e: e.label)
    def test_cocycles_close(self, entry):
        for instance in sample_parameters(entry, 2, seed=3):
            for name, value in check_cocycles(instance.bialgebra).items():
                assert value.is_zero(), f"{name} = {value}"

    @pytest.mark.parametrize("label,binding", [
        ("((A1,X~1),(A1,X2))", {}),
        ("((II,0),(I,X1))", {"rp1": 2, "rp2": Fraction(-1, 3)}),
    ])
    def test_coboundary_differential_matches_printed_r(self, label, binding, instance_of):
        instance = instance_of(label, **binding)
        assert check_coboundary_differential(instance.bialgebra, instance.r).is_valid
