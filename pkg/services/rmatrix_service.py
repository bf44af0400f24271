"""R-Matrix Service — the coboundary equation, its exact solution space, classification.

The coboundary equation for one side is written per basis index i as

    Y_i + A_iᵀ r + r A_i + c_i r + V_i = 0,   (V_i)^{jk} = v^j δ_i^k − v^k δ_i^j

with (Y, A, c, v) = (𝒴̃, 𝒳, β, α) on the primal side and (𝒴, 𝒳̃, α, β)
on the dual side. It is linear in the strict-upper entries of r and is
solved exactly by row reduction over the rationals.
"""

import logging
import time
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

import sympy

from models.bialgebra import JacobiLieBialgebra
from models.lie import LieAlgebra, fraction, rational
from models.multivector import Multivector
from models.rmatrix import Classification, Equivalence, Kind, RMatrix, SolutionSpace
from services.exterior_service import contract, schouten, wedge
from services.lie_service import adjoint_matrices, apply_automorphism
from utils.validators import StructuralError, validate_side

logger = logging.getLogger(__name__)


def _ingredients(b: JacobiLieBialgebra, side: str):
    """(Y, A, c, v) for the chosen side."""
    validate_side(side)
    primal = adjoint_matrices(b.g)
    dual = adjoint_matrices(b.g, "dual", b.dual)
    if side == "primal":
        return dual.Y, primal.X, b.beta, b.alpha
    return primal.Y, dual.X, b.alpha, b.beta


def _inhomogeneous(Y, v, i: int, n: int) -> sympy.Matrix:
    V = sympy.zeros(n, n)
    for j in range(n):
        if j != i:
            V[j, i] += rational(v[j])
            V[i, j] -= rational(v[j])
    return sympy.Matrix(Y[i]) + V


def _unit(n: int, a: int, c: int) -> sympy.Matrix:
    E = sympy.zeros(n, n)
    E[a, c] = 1
    E[c, a] = -1
    return E


def residual_matrices(b: JacobiLieBialgebra, r: RMatrix, side: str = "primal") -> List[sympy.Matrix]:
    """Left-hand side of the coboundary equation, one matrix per basis index."""
    if r.side != side:
        raise StructuralError("r", f"expected a {side} r-matrix, got {r.side}")
    if r.dim != b.dim:
        raise StructuralError("r", f"dimension {r.dim} does not match bialgebra dimension {b.dim}")
    Y, A, c, v = _ingredients(b, side)
    n = b.dim
    m = sympy.Matrix(r.m)
    return [
        _inhomogeneous(Y, v, i, n) + A[i].T * m + m * A[i] + rational(c[i]) * m
        for i in range(n)
    ]


def coboundary_residual(b: JacobiLieBialgebra, r: RMatrix, side: str = "primal") -> List[List[List[Fraction]]]:
    """Residual T[i][j][k] of the coboundary equation; zero iff r solves it.

    Primal: T_i^{jk} = f̃^{jk}_i + r^{mk} f_im^j − r^{mj} f_im^k − β_i r^{jk} − α^j δ_i^k + α^k δ_i^j.
    """
    n = b.dim
    mats = residual_matrices(b, r, side)
    return [[[-fraction(mats[i][j, k]) for k in range(n)] for j in range(n)] for i in range(n)]


def residual_is_zero(b: JacobiLieBialgebra, r: RMatrix, side: str = "primal") -> bool:
    return all(M.is_zero_matrix for M in residual_matrices(b, r, side))


def build_linear_system(b: JacobiLieBialgebra, side: str = "primal") -> Tuple[sympy.Matrix, sympy.Matrix]:
    """(M, rhs) with one row per (i, j, k) and one column per strict-upper (a, c)."""
    Y, A, c, v = _ingredients(b, side)
    n = b.dim
    pairs = list(combinations(range(n), 2))
    M = sympy.zeros(n ** 3, len(pairs))
    rhs = sympy.zeros(n ** 3, 1)
    for i in range(n):
        constant = _inhomogeneous(Y, v, i, n)
        images = []
        for a, cc in pairs:
            E = _unit(n, a, cc)
            images.append(A[i].T * E + E * A[i] + rational(c[i]) * E)
        for j in range(n):
            for k in range(n):
                row = (i * n + j) * n + k
                rhs[row] = -constant[j, k]
                for p, image in enumerate(images):
                    M[row, p] = image[j, k]
    return M, rhs


def _from_vector(side: str, n: int, values) -> RMatrix:
    pairs = list(combinations(range(n), 2))
    return RMatrix.from_upper(side, n, {pair: fraction(v) for pair, v in zip(pairs, values)})


def solve_r(b: JacobiLieBialgebra, side: str = "primal") -> SolutionSpace:
    """Exact affine solution set. Free unknowns are 0 in the particular solution."""
    start = time.monotonic()
    M, rhs = build_linear_system(b, side)
    n, unknowns = b.dim, M.cols
    reduced, pivots = M.row_join(rhs).rref()
    if unknowns in pivots:
        logger.debug("solve_r [label=%s, side=%s] infeasible", b.label, side)
        return SolutionSpace.infeasible(side, n)
    values = [sympy.Integer(0)] * unknowns
    for row, col in enumerate(pivots):
        values[col] = reduced[row, unknowns]
    basis = tuple(_from_vector(side, n, list(vec)) for vec in M.nullspace())
    space = SolutionSpace(side=side, dim=n, feasible=True,
                          particular=_from_vector(side, n, values), basis=basis)
    logger.debug("solve_r [label=%s, side=%s] free_dim=%d duration=%.1fms",
                 b.label, side, space.free_dim, (time.monotonic() - start) * 1000)
    return space


def membership(space: SolutionSpace, r: RMatrix) -> Optional[Tuple[Fraction, ...]]:
    """Coordinates of r − particular in the basis, or None when r is not a solution."""
    if not space.feasible or r.side != space.side or r.dim != space.dim:
        return None
    target = sympy.Matrix([rational(v) for v in (r - space.particular).upper()])
    if not space.basis:
        return () if target.is_zero_matrix else None
    B = sympy.Matrix.hstack(*[sympy.Matrix([rational(v) for v in e.upper()]) for e in space.basis])
    try:
        solution, params = B.gauss_jordan_solve(target)
    except ValueError:
        return None
    solution = solution.subs({p: 0 for p in params})
    return tuple(fraction(v) for v in solution)


# ── Classification ───────────────────────────────────────────────────

def classify_r(b: JacobiLieBialgebra, r: RMatrix) -> Classification:
    """Residue ϖ = [r,r] − 2X₀∧r, Jacobi condition [X₀,r] and defect i_{φ₀}r − X₀.

    A dual r-matrix is classified with the roles of the two sides exchanged.
    Only the Jacobi condition decides consistency; the defect is reported.
    """
    if r.dim != b.dim:
        raise StructuralError("r", f"dimension {r.dim} does not match bialgebra dimension {b.dim}")
    if r.side == "primal":
        space, cocycle, other = b.g, b.x0, b.phi0
    else:
        space, cocycle, other = b.dual, b.phi0, b.x0
    rv = r.to_bivector(space)
    residue = schouten(rv, rv) - wedge(cocycle, rv) * 2
    jacobi = schouten(cocycle, rv)
    defect = contract(other, rv) - cocycle
    if not jacobi.is_zero():
        kind = Kind.NOT_COBOUNDARY_CONSISTENT
    elif residue.is_zero():
        kind = Kind.TRIANGULAR
    else:
        kind = Kind.QUASITRIANGULAR
    logger.debug("classify_r [label=%s, side=%s] kind=%s", b.label, r.side, kind.value)
    return Classification(side=r.side, kind=kind, residue=residue,
                          jacobi_condition=jacobi, contraction_defect=defect)


def gcybe_limit(g: LieAlgebra, r: RMatrix) -> Multivector:
    """[r,r]: the residue with X₀ = φ₀ = 0, i.e. the classical Yang–Baxter left-hand side."""
    if r.side != "primal":
        raise StructuralError("r", "the Yang-Baxter limit acts on primal r-matrices")
    zero = tuple(Fraction(0) for _ in range(g.dim))
    limit = JacobiLieBialgebra(g=g, dual=LieAlgebra.abelian(g.dim), alpha=zero, beta=zero,
                               label=f"{g.name} (X0=0)")
    return classify_r(limit, r).residue


# ── Equivalence ──────────────────────────────────────────────────────

def check_equivalence(b1: JacobiLieBialgebra, r1: RMatrix, b2: JacobiLieBialgebra,
                      r2: RMatrix, C) -> Equivalence:
    """Are (b1, r1) and (b2, r2) related by the automorphism C?

    C must carry b1 onto b2; then Δ = CᵀrC − r' must be annihilated by
    Δ ↦ 𝒳'ᵢᵀΔ + Δ𝒳'ᵢ + β'ᵢΔ for every i.
    """
    if r1.side != "primal" or r2.side != "primal":
        raise StructuralError("r", "equivalence compares primal r-matrices")
    moved = apply_automorphism(C, b1)
    intertwines = (moved.g.f == b2.g.f and moved.dual.f == b2.dual.f
                   and moved.alpha == b2.alpha and moved.beta == b2.beta)
    Cm = C.C
    delta = RMatrix("primal", sympy.ImmutableMatrix(Cm.T * r1.m * Cm - r2.m))
    X = adjoint_matrices(b2.g).X
    defects = {}
    for i in range(b2.dim):
        value = X[i].T * delta.m + delta.m * X[i] + rational(b2.beta[i]) * delta.m
        if not value.is_zero_matrix:
            defects[i + 1] = sympy.ImmutableMatrix(value)
    return Equivalence(equivalent=intertwines and not defects, intertwines=intertwines,
                       delta=delta, defects=defects)
