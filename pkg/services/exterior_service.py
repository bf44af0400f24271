"""Exterior Service — wedge, contraction, Schouten brackets, differentials.

All operations are exact and act on ``models.multivector.Multivector``.
Sign conventions:

    i_φ(X_{i0}∧…∧X_{ik-1}) = Σ_a (−1)^a φ(X_{ia}) X_{i0}∧…X̂_{ia}…
    [P,Q] = (−1)^{p+1} Σ_{a,b} (−1)^{a+b} [X_{ia},X_{jb}]∧P\\a∧Q\\b
    d_*X_i = −Σ_{j<k} f̃^{jk}_i X_j∧X_k,   dX̃^i = −Σ_{j<k} f_jk^i X̃^j∧X̃^k

which makes the Schouten bracket graded-antisymmetric, a graded
derivation and graded-Jacobi, and equal to the Lie bracket on vectors.
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, List

from models.bialgebra import JacobiLieBialgebra
from models.lie import LieAlgebra
from models.multivector import Key, Multivector, sort_with_sign
from models.rmatrix import RMatrix
from utils.validators import StructuralError, ValidationResult, validate_mode

logger = logging.getLogger(__name__)

OPPOSITE = {"primal": "dual", "dual": "primal"}


def _same_space(P: Multivector, Q: Multivector, op: str):
    if P.side != Q.side or P.dim != Q.dim:
        raise StructuralError(op, f"mixed spaces: {P.side}/{P.dim} vs {Q.side}/{Q.dim}")


def wedge(P: Multivector, Q: Multivector) -> Multivector:
    _same_space(P, Q, "wedge")
    terms: Dict[Key, Fraction] = {}
    for I, p in P.components.items():
        for J, q in Q.components.items():
            sign, key = sort_with_sign(I + J)
            if sign:
                terms[key] = terms.get(key, Fraction(0)) + sign * p * q
    return Multivector(P.space, P.side, P.degree + Q.degree, terms)


def pair(phi: Multivector, P: Multivector) -> Fraction:
    """φ(P) for a covector and a vector on opposite sides."""
    if phi.degree != 1 or P.degree != 1:
        raise StructuralError("pair", "pairing needs two degree-1 elements")
    if phi.side != OPPOSITE[P.side] or phi.dim != P.dim:
        raise StructuralError("pair", "pairing needs opposite sides of the same dimension")
    return sum((phi.coefficient(i) * P.coefficient(i) for i in range(P.dim)), Fraction(0))


def contract(phi: Multivector, P: Multivector) -> Multivector:
    """Interior product i_φ P, φ of degree 1 on the side opposite to P."""
    if phi.degree != 1:
        raise StructuralError("contract", f"contracting element must have degree 1, got {phi.degree}")
    if phi.side != OPPOSITE[P.side] or phi.dim != P.dim:
        raise StructuralError("contract", f"cannot contract {phi.side} into {P.side}")
    if P.degree == 0:
        raise StructuralError("contract", "cannot contract a scalar")
    terms: Dict[Key, Fraction] = {}
    for I, p in P.components.items():
        for a, index in enumerate(I):
            weight = phi.coefficient(index)
            if weight == 0:
                continue
            rest = I[:a] + I[a + 1:]
            terms[rest] = terms.get(rest, Fraction(0)) + (-1) ** a * weight * p
    return Multivector(P.space, P.side, P.degree - 1, terms)


def _basis_bracket(space: LieAlgebra, i: int, j: int) -> Dict[int, Fraction]:
    return {k: space.f[i][j][k] for k in range(space.dim) if space.f[i][j][k] != 0}


def schouten(P: Multivector, Q: Multivector) -> Multivector:
    """Schouten–Nijenhuis bracket with the bracket of ``P.space``. Scalars bracket to zero."""
    _same_space(P, Q, "schouten")
    p, q = P.degree, Q.degree
    degree = max(p + q - 1, 0)
    if p == 0 or q == 0:
        return Multivector.zero(P.space, P.side, degree)
    terms: Dict[Key, Fraction] = {}
    outer = (-1) ** (p + 1)
    for I, cp in P.components.items():
        for J, cq in Q.components.items():
            for a, ia in enumerate(I):
                P_rest = I[:a] + I[a + 1:]
                for b, jb in enumerate(J):
                    Q_rest = J[:b] + J[b + 1:]
                    weight = outer * (-1) ** (a + b) * cp * cq
                    for k, fk in _basis_bracket(P.space, ia, jb).items():
                        sign, key = sort_with_sign((k,) + P_rest + Q_rest)
                        if sign:
                            terms[key] = terms.get(key, Fraction(0)) + sign * weight * fk
    return Multivector(P.space, P.side, degree, terms)


def schouten_modified(P: Multivector, Q: Multivector, cocycle: Multivector, side: str) -> Multivector:
    """Cocycle-modified brackets.

    primal: [P,Q] − φ₀(P)·Q for a vector P.
    dual:   [Q,Q'] + (−1)^{k+1}(k−1) Q∧i_{X₀}Q' − (k'−1) i_{X₀}Q∧Q'.
    """
    if cocycle.degree != 1 or cocycle.side != OPPOSITE[P.side]:
        raise StructuralError("cocycle", "cocycle must be a degree-1 element of the opposite side")
    if side == "primal":
        if P.side != "primal":
            raise StructuralError("side", "primal modified bracket acts on primal multivectors")
        if P.degree != 1:
            raise StructuralError("degree", "primal modified bracket needs a vector first argument")
        return schouten(P, Q) - Q * pair(cocycle, P)
    if P.side != "dual":
        raise StructuralError("side", "dual modified bracket acts on dual multivectors")
    k, k2 = P.degree, Q.degree
    result = schouten(P, Q)
    if k2 > 0 and k != 1:
        result = result + wedge(P, contract(cocycle, Q)) * ((-1) ** (k + 1) * (k - 1))
    if k > 0 and k2 != 1:
        result = result - wedge(contract(cocycle, P), Q) * (k2 - 1)
    return result


def interior_x0(bialg: JacobiLieBialgebra, Q: Multivector) -> Multivector:
    """i_{X₀}Q for a dual multivector Q."""
    return contract(bialg.x0, Q)


# ── Differentials ────────────────────────────────────────────────────

def cochain_differential(V: Multivector, constants: LieAlgebra) -> Multivector:
    """Graded derivation with d(e_i) = −Σ_{j<k} c_jk^i e_j∧e_k, c taken from ``constants``."""
    if constants.dim != V.dim:
        raise StructuralError("constants", f"dimension {constants.dim} does not match {V.dim}")
    generators = []
    for i in range(V.dim):
        generators.append(Multivector(V.space, V.side, 2, {
            (j, k): -constants.f[j][k][i]
            for j, k in combinations(range(V.dim), 2)
        }))
    result = Multivector.zero(V.space, V.side, V.degree + 1)
    for I, c in V.components.items():
        for a, index in enumerate(I):
            left = Multivector.basis(V.space, V.side, *I[:a])
            right = Multivector.basis(V.space, V.side, *I[a + 1:])
            term = wedge(wedge(left, generators[index]), right)
            result = result + term * ((-1) ** a * c)
    return result


def ce_differential(V: Multivector, mode: str, bialg: JacobiLieBialgebra) -> Multivector:
    """d_star / d_star_X0 act on primal multivectors, d / d_phi0 on dual ones."""
    validate_mode(mode)
    primal_modes = ("d_star", "d_star_X0")
    expected = "primal" if mode in primal_modes else "dual"
    if V.side != expected:
        raise StructuralError("mode", f"{mode} acts on {expected} multivectors, got {V.side}")
    if bialg.dual is None:
        raise StructuralError("dual", "missing dual constants")
    if mode in primal_modes:
        result = cochain_differential(V, bialg.dual)
        if mode == "d_star_X0":
            result = result + wedge(bialg.x0, V)
        return result
    result = cochain_differential(V, bialg.g)
    if mode == "d_phi0":
        result = result + wedge(bialg.phi0, V)
    return result


def check_cocycles(bialg: JacobiLieBialgebra) -> Dict[str, Multivector]:
    """d_*X₀ and dφ₀; both vanish for a Jacobi-Lie bialgebra."""
    return {
        "d_star_x0": ce_differential(bialg.x0, "d_star", bialg),
        "d_phi0": ce_differential(bialg.phi0, "d", bialg),
    }


def basis_monomials(space: LieAlgebra, side: str, degree: int) -> List[Multivector]:
    return [Multivector.basis(space, side, *I) for I in combinations(range(space.dim), degree)]


def d_squared(g: LieAlgebra, degree: int = None) -> ValidationResult:
    """d∘d on every basis cochain (all degrees unless one is given)."""
    space = LieAlgebra.abelian(g.dim)
    degrees = range(g.dim + 1) if degree is None else [degree]
    result = ValidationResult()
    for k in degrees:
        for W in basis_monomials(space, "dual", k):
            dd = cochain_differential(cochain_differential(W, g), g)
            if not dd.is_zero():
                key = next(iter(W.components))
                result.add_error(f"{g.name}:d^2{tuple(i + 1 for i in key)}", str(dd))
    return result


def check_coboundary_differential(bialg: JacobiLieBialgebra, r: RMatrix) -> ValidationResult:
    """d_{*X₀}X_i equals ad_{(φ₀,1)}(X_i) r for every basis element."""
    result = ValidationResult()
    rv = r.to_bivector(bialg.g)
    for i in range(bialg.dim):
        Xi = Multivector.basis(bialg.g, "primal", i)
        lhs = ce_differential(Xi, "d_star_X0", bialg)
        rhs = schouten_modified(Xi, rv, bialg.phi0, "primal")
        if lhs != rhs:
            result.add_error(f"X{i + 1}", f"d*X0 X = {lhs}, ad(phi0,1) r = {rhs}")
    return result
