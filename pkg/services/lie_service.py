"""Lie Service — structure constants, adjoint representations, automorphisms.

Everything here is exact: constants are Fractions, matrices are sympy
rational matrices. No floating point.
"""

import logging
import time
from fractions import Fraction
from typing import Optional, Sequence

import sympy

from models.bialgebra import JacobiLieBialgebra
from models.lie import (
    AdjointRep, Automorphism, LieAlgebra, fraction, freeze, rational, to_matrix, zero_constants,
)
from utils.validators import SingularityError, StructuralError, ValidationResult

logger = logging.getLogger(__name__)


def _shape_check(f) -> int:
    dim = len(f)
    if dim == 0:
        raise StructuralError("f", "empty constant array")
    for i, plane in enumerate(f):
        if len(plane) != dim or any(len(row) != dim for row in plane):
            raise StructuralError("f", f"array is not {dim}x{dim}x{dim} (slice {i + 1})")
    return dim


def validate_structure_constants(f) -> ValidationResult:
    """Antisymmetry and Jacobi violations of a constant array (empty iff a Lie algebra)."""
    if isinstance(f, LieAlgebra):
        f = f.f
    dim = _shape_check(f)
    result = ValidationResult()
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                if f[i][j][k] + f[j][i][k] != 0:
                    result.add_error(f"antisymmetry({i + 1},{j + 1},{k + 1})",
                                     f"f_ij^k + f_ji^k = {f[i][j][k] + f[j][i][k]}")
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for l in range(dim):
                    total = sum(
                        (f[i][j][m] * f[m][k][l] + f[j][k][m] * f[m][i][l] + f[k][i][m] * f[m][j][l]
                         for m in range(dim)),
                        Fraction(0),
                    )
                    if total != 0:
                        result.add_error(f"jacobi({i + 1},{j + 1},{k + 1},{l + 1})", f"residual {total}")
    return result


def adjoint_matrices(g: LieAlgebra, side: str = "primal",
                     dual_f: Optional[LieAlgebra] = None) -> AdjointRep:
    """Primal: 𝒳_i and 𝒴^k from f. Dual: 𝒳̃^i and 𝒴̃_k from the dual constants."""
    if side == "dual":
        if dual_f is None:
            raise StructuralError("dual_f", "dual constants are required for side=dual")
        source = dual_f
    else:
        source = g
    constants = source.f if isinstance(source, LieAlgebra) else source
    validate_structure_constants(constants).raise_if_invalid()
    dim = len(constants)
    X = tuple(
        to_matrix([[-constants[i][j][k] for k in range(dim)] for j in range(dim)])
        for i in range(dim)
    )
    Y = tuple(
        to_matrix([[-constants[i][j][k] for j in range(dim)] for i in range(dim)])
        for k in range(dim)
    )
    return AdjointRep(side=side, X=X, Y=Y)


def lie_bracket_vectors(g: LieAlgebra, X: Sequence, Y: Sequence) -> tuple:
    if len(X) != g.dim or len(Y) != g.dim:
        raise StructuralError("vector", f"expected length {g.dim}, got {len(X)} and {len(Y)}")
    return tuple(
        sum((Fraction(X[i]) * Fraction(Y[j]) * g.f[i][j][k]
             for i in range(g.dim) for j in range(g.dim)), Fraction(0))
        for k in range(g.dim)
    )


def commutator(A: sympy.Matrix, B: sympy.Matrix) -> sympy.Matrix:
    return A * B - B * A


def check_representation(g: LieAlgebra) -> ValidationResult:
    """[𝒳_i, 𝒳_j] = f_ij^k 𝒳_k exactly."""
    rep = adjoint_matrices(g)
    result = ValidationResult()
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            expected = sympy.zeros(g.dim, g.dim)
            for k in range(g.dim):
                expected += rational(g.f[i][j][k]) * rep.X[k]
            if not (commutator(rep.X[i], rep.X[j]) - expected).is_zero_matrix:
                result.add_error(f"representation({i + 1},{j + 1})", "[X_i,X_j] != f_ij^k X_k")
    return result


def killing_form(g: LieAlgebra) -> sympy.ImmutableMatrix:
    X = adjoint_matrices(g).X
    return sympy.ImmutableMatrix(g.dim, g.dim, lambda i, j: (X[i] * X[j]).trace())


def is_unimodular(g: LieAlgebra) -> bool:
    return all(m.trace() == 0 for m in adjoint_matrices(g).X)


def structure_constants_from_matrices(mats: Sequence[sympy.Matrix], name: str = "recovered") -> LieAlgebra:
    """Recover f from a matrix basis closed under commutators.

    Raises StructuralError when the span is not closed or the matrices are
    linearly dependent.
    """
    dim = len(mats)
    columns = sympy.Matrix.hstack(*[sympy.Matrix(m).reshape(len(m), 1) for m in mats])
    if columns.rank() != dim:
        raise StructuralError("matrices", "basis matrices are linearly dependent")
    constants = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            target = commutator(sympy.Matrix(mats[i]), sympy.Matrix(mats[j]))
            target = target.reshape(len(target), 1)
            try:
                solution, params = columns.gauss_jordan_solve(target)
            except ValueError:
                raise StructuralError("matrices", f"[M{i + 1},M{j + 1}] leaves the span")
            for k in range(dim):
                if solution[k] != 0:
                    constants[(i, j, k)] = fraction(solution[k])
    return LieAlgebra.from_constants(name, dim, constants)


# ── Automorphisms ────────────────────────────────────────────────────

def _inverse(C: sympy.Matrix, field: str = "C") -> sympy.ImmutableMatrix:
    if C.rows != C.cols:
        raise StructuralError(field, f"expected a square matrix, got {C.shape}")
    if C.det() == 0:
        raise SingularityError(field, "matrix is not invertible")
    return sympy.ImmutableMatrix(C.inv())


def transform_constants(f, C: sympy.Matrix, Cinv: sympy.Matrix):
    """f'_mn^k = (C⁻¹)_m^i (C⁻¹)_n^j f_ij^l C_l^k."""
    dim = len(f)
    out = zero_constants(dim)
    for m in range(dim):
        for n in range(dim):
            for k in range(dim):
                total = sympy.Integer(0)
                for i in range(dim):
                    for j in range(dim):
                        if Cinv[m, i] == 0 or Cinv[n, j] == 0:
                            continue
                        for l in range(dim):
                            if f[i][j][l] != 0:
                                total += Cinv[m, i] * Cinv[n, j] * rational(f[i][j][l]) * C[l, k]
                out[m][n][k] = fraction(total)
    return freeze(out)


def transform_dual_constants(fd, C: sympy.Matrix, Cinv: sympy.Matrix):
    """f̃'^{kl}_m = C_i^k C_j^l f̃^{ij}_n (C⁻¹)_m^n."""
    dim = len(fd)
    out = zero_constants(dim)
    for k in range(dim):
        for l in range(dim):
            for m in range(dim):
                total = sympy.Integer(0)
                for i in range(dim):
                    for j in range(dim):
                        if C[i, k] == 0 or C[j, l] == 0:
                            continue
                        for n in range(dim):
                            if fd[i][j][n] != 0:
                                total += C[i, k] * C[j, l] * rational(fd[i][j][n]) * Cinv[m, n]
                out[k][l][m] = fraction(total)
    return freeze(out)


def make_automorphism(source: LieAlgebra, target: Optional[LieAlgebra], C) -> Automorphism:
    """Wrap C (rows = images of the source basis); singular C raises SingularityError."""
    C = sympy.ImmutableMatrix(C) if not isinstance(C, sympy.ImmutableMatrix) else C
    if C.rows != source.dim:
        raise StructuralError("C", f"expected {source.dim}x{source.dim}, got {C.shape}")
    Cinv = _inverse(C)
    if target is None:
        target = LieAlgebra(f"{source.name}'", source.dim, transform_constants(source.f, C, Cinv))
    return Automorphism(source=source, target=target, C=C, inverse=Cinv)


def automorphism_check(C: Automorphism, source: LieAlgebra = None, target: LieAlgebra = None) -> ValidationResult:
    """f_ij^l = C_i^m f'_mn^k C_j^n (C⁻¹)_k^l for every index."""
    source = source or C.source
    target = target or C.target
    result = ValidationResult()
    if source.dim != target.dim or C.C.rows != source.dim:
        result.add_error("C", "dimension mismatch")
        return result
    Cinv = C.inverse if C.inverse is not None else _inverse(C.C)
    expected = transform_constants(source.f, C.C, Cinv)
    for i in range(source.dim):
        for j in range(source.dim):
            for k in range(source.dim):
                if expected[i][j][k] != target.f[i][j][k]:
                    result.add_error(f"f'({i + 1},{j + 1},{k + 1})",
                                     f"expected {expected[i][j][k]}, target has {target.f[i][j][k]}")
    return result


def apply_automorphism(C: Automorphism, bialg: JacobiLieBialgebra) -> JacobiLieBialgebra:
    """Primed bialgebra: α' = Cᵀα, β' = C⁻¹β and the transformed constants."""
    start = time.monotonic()
    if C.source.dim != bialg.dim or C.source.f != bialg.g.f:
        raise StructuralError("C", f"source {C.source.name} is not the primal algebra of {bialg}")
    Cm = C.C
    Cinv = C.inverse if C.inverse is not None else _inverse(Cm)
    alpha = sympy.Matrix([rational(a) for a in bialg.alpha])
    beta = sympy.Matrix([rational(b) for b in bialg.beta])
    alpha_p = Cm.T * alpha
    beta_p = Cinv * beta
    g_p = LieAlgebra(C.target.name, bialg.dim, transform_constants(bialg.g.f, Cm, Cinv), C.target.params)
    dual_p = LieAlgebra(bialg.dual.name, bialg.dim, transform_dual_constants(bialg.dual.f, Cm, Cinv),
                        bialg.dual.params)
    out = JacobiLieBialgebra(
        g=g_p,
        dual=dual_p,
        alpha=tuple(fraction(v) for v in alpha_p),
        beta=tuple(fraction(v) for v in beta_p),
        label=bialg.label,
    )
    logger.debug("apply_automorphism [%s -> %s] duration=%.1fms",
                 C.source.name, C.target.name, (time.monotonic() - start) * 1000)
    return out


def random_invertible(dim: int, rng, max_den: int = 5, bound: int = 3) -> sympy.ImmutableMatrix:
    """Random invertible rational matrix (numpy Generator ``rng``)."""
    while True:
        rows = [[Fraction(int(rng.integers(-bound * max_den, bound * max_den + 1)),
                          int(rng.integers(1, max_den + 1))) for _ in range(dim)] for _ in range(dim)]
        C = to_matrix(rows)
        if C.det() != 0:
            return C
