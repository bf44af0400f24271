"""Tests for structure constants, adjoint matrices and automorphisms."""
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from models.lie import LieAlgebra, zero_constants
from repositories.algebra_repo import algebra_names, get_algebra
from repositories.bialgebra_repo import get_entry, load_catalog
from services.bialgebra_service import instantiate, instantiate_algebra, is_valid, sample_parameters
from services.lie_service import (
    adjoint_matrices, apply_automorphism, automorphism_check, check_representation, is_unimodular,
    killing_form, lie_bracket_vectors, make_automorphism, random_invertible,
    structure_constants_from_matrices, transform_constants, validate_structure_constants,
)
from utils.validators import SingularityError, StructuralError

UNPARAMETRISED = ("II", "III", "IV", "V", "VI_0", "VII_0", "VIII", "IX")


class TestStructureConstants:
    @pytest.mark.parametrize("name", algebra_names())
    def test_every_catalog_algebra_is_a_lie_algebra(self, name, sampled_algebra):
        assert validate_structure_constants(sampled_algebra(name)).is_valid

    def test_antisymmetry_violation(self):
        f = zero_constants(3)
        f[0][1][2] = Fraction(1)
        f[1][0][2] = Fraction(1)
        result = validate_structure_constants(f)
        assert not result.is_valid
        assert any("antisymmetry" in e.field for e in result)

    def test_jacobi_violation(self):
        # [X1,X2] = X1, [X2,X3] = X2, [X1,X3] = X3 is antisymmetric but not Jacobi
        g = LieAlgebra.from_constants("broken", 3, {(0, 1, 0): 1, (1, 2, 1): 1, (0, 2, 2): 1})
        result = validate_structure_constants(g)
        assert any("jacobi" in e.field for e in result)

    def test_ragged_array(self):
        with pytest.raises(StructuralError):
            validate_structure_constants([[[0, 0], [0, 0]], [[0, 0]]])

    def test_bracket_of_vectors(self, algebra_of):
        g = algebra_of("V")
        assert lie_bracket_vectors(g, (1, 0, 0), (0, 1, 0)) == (0, -1, 0)


class TestAdjoint:
    @pytest.mark.parametrize("name", UNPARAMETRISED)
    def test_representation(self, name, algebra_of):
        assert check_representation(algebra_of(name)).is_valid

    def test_adjoint_entries(self, algebra_of):
        X = adjoint_matrices(algebra_of("V")).X
        # (X_1)_j^k = -f_1j^k
        assert X[0][1, 1] == 1 and X[0][2, 2] == 1

    def test_dual_side_needs_dual_constants(self, algebra_of):
        with pytest.raises(StructuralError):
            adjoint_matrices(algebra_of("V"), side="dual")

    def test_killing_form_of_nilpotent_algebra_vanishes(self, algebra_of):
        assert killing_form(algebra_of("II")).is_zero_matrix

    def test_killing_form_of_so3_is_definite(self, algebra_of):
        K = killing_form(algebra_of("IX"))
        assert all(v < 0 for v in K.eigenvals())

    def test_unimodularity(self, algebra_of):
        assert is_unimodular(algebra_of("II"))
        assert is_unimodular(algebra_of("VIII"))
        assert not is_unimodular(algebra_of("V"))

    def test_constants_recovered_from_faithful_adjoint(self, algebra_of):
        g = algebra_of("V")
        recovered = structure_constants_from_matrices(adjoint_matrices(g).X)
        assert recovered.f == g.f


class TestAutomorphisms:
    def test_singular_matrix(self, algebra_of):
        with pytest.raises(SingularityError):
            make_automorphism(algebra_of("V"), None, sympy.zeros(3, 3))

    def test_identity_is_an_automorphism(self, algebra_of):
        g = algebra_of("VI_0")
        C = make_automorphism(g, g, sympy.eye(3))
        assert automorphism_check(C).is_valid

    def test_wrong_target_is_reported(self, algebra_of):
        C = make_automorphism(algebra_of("V"), algebra_of("II"), sympy.eye(3))
        assert not automorphism_check(C).is_valid

    @given(seed=st.integers(0, 10_000), name=st.sampled_from(UNPARAMETRISED))
    def test_transformed_constants_stay_lie(self, seed, name):
        g = instantiate_algebra(get_algebra(name), {})
        C = random_invertible(3, np.random.default_rng(seed))
        transformed = transform_constants(g.f, C, C.inv())
        assert validate_structure_constants(transformed).is_valid
        assert automorphism_check(make_automorphism(g, None, C)).is_valid


class TestApplyAutomorphism:
    @pytest.mark.parametrize("entry", load_catalog(), ids=lambda e: e.label)
    def test_identity_leaves_the_row_unchanged(self, entry):
        b = sample_parameters(entry, 1, seed=4)[0].bialgebra
        out = apply_automorphism(make_automorphism(b.g, b.g, sympy.eye(b.dim)), b)
        assert out.g.f == b.g.f and out.dual.f == b.dual.f
        assert out.alpha == b.alpha and out.beta == b.beta

    @pytest.mark.parametrize("lam", [Fraction(3), Fraction(-1, 2), Fraction(1, 3)])
    def test_diagonal_rescaling(self, lam):
        # C = diag(1, λ) fixes A1: α' = Cᵀα and β' = C⁻¹β
        b = instantiate(get_entry("((A1,X~1),(A1,X2))")).bialgebra
        C = sympy.diag(1, lam)
        out = apply_automorphism(make_automorphism(b.g, b.g, C), b)
        assert out.alpha == (0, lam)
        assert out.beta == (1, 0)
        assert list(C.T.inv() * sympy.Matrix(out.alpha)) == list(b.alpha)
        assert list(C * sympy.Matrix(out.beta)) == list(b.beta)
        assert is_valid(out)

    @pytest.mark.parametrize("entry", load_catalog(), ids=lambda e: e.label)
    def test_random_automorphisms_keep_the_row_a_bialgebra(self, entry):
        b = sample_parameters(entry, 1, seed=4)[0].bialgebra
        rng = np.random.default_rng(29)
        for _ in range(20):
            C = random_invertible(b.dim, rng)
            out = apply_automorphism(make_automorphism(b.g, None, C), b)
            assert is_valid(out), C

    def test_source_must_be_the_primal_algebra(self, algebra_of):
        b = instantiate(get_entry("((II,0),(I,X1))")).bialgebra
        with pytest.raises(StructuralError):
            apply_automorphism(make_automorphism(algebra_of("V"), None, sympy.eye(3)), b)
