"""
r-matrix models
===============
An r-matrix is stored as the full antisymmetric matrix r^{ij} (primal) or
r̃_{ij} (dual) over the rationals; ``r = Σ_{i<j} r^{ij} X_i∧X_j``.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional, Tuple

import sympy

from models.lie import fraction, rational
from models.multivector import Multivector
from utils.validators import StructuralError


class Kind(str, Enum):
    TRIANGULAR = "triangular"
    QUASITRIANGULAR = "quasitriangular"
    NOT_COBOUNDARY_CONSISTENT = "not-coboundary-consistent"


@dataclass(frozen=True)
class RMatrix:
    side: str
    m: sympy.ImmutableMatrix

    def __post_init__(self):
        if self.m.rows != self.m.cols:
            raise StructuralError("r", f"expected a square matrix, got {self.m.shape}")
        if not (self.m + self.m.T).is_zero_matrix:
            raise StructuralError("r", "r-matrix is not antisymmetric")

    @classmethod
    def from_upper(cls, side: str, dim: int, entries: Mapping[Tuple[int, int], Fraction]) -> "RMatrix":
        """Build from {(i, j): value} with i<j (0-based)."""
        m = sympy.zeros(dim, dim)
        for (i, j), value in entries.items():
            if i == j:
                raise StructuralError("r", f"diagonal entry ({i + 1},{j + 1})")
            m[i, j] = rational(value)
            m[j, i] = -rational(value)
        return cls(side, sympy.ImmutableMatrix(m))

    @classmethod
    def zero(cls, side: str, dim: int) -> "RMatrix":
        return cls(side, sympy.ImmutableMatrix.zeros(dim, dim))

    @classmethod
    def from_bivector(cls, P: Multivector) -> "RMatrix":
        if P.degree != 2:
            raise StructuralError("r", f"expected a bivector, got degree {P.degree}")
        return cls.from_upper(P.side, P.dim, {key: value for key, value in P.components.items()})

    @property
    def dim(self) -> int:
        return self.m.rows

    def entry(self, i: int, j: int) -> Fraction:
        return fraction(self.m[i, j])

    def upper(self) -> Tuple[Fraction, ...]:
        """Strict-upper entries in lexicographic (i, j) order: the solver's unknowns."""
        return tuple(self.entry(i, j) for i in range(self.dim) for j in range(i + 1, self.dim))

    def to_bivector(self, space) -> Multivector:
        return Multivector(space, self.side, 2, {
            (i, j): self.entry(i, j) for i in range(self.dim) for j in range(i + 1, self.dim)
        })

    def __add__(self, other: "RMatrix") -> "RMatrix":
        if other.side != self.side or other.dim != self.dim:
            raise StructuralError("r", "cannot add r-matrices of different sides or dimensions")
        return RMatrix(self.side, sympy.ImmutableMatrix(self.m + other.m))

    def __sub__(self, other: "RMatrix") -> "RMatrix":
        return self + other.scaled(-1)

    def scaled(self, value) -> "RMatrix":
        return RMatrix(self.side, sympy.ImmutableMatrix(self.m * rational(value)))

    def is_zero(self) -> bool:
        return self.m.is_zero_matrix


@dataclass(frozen=True)
class SolutionSpace:
    """Affine solution set particular + span(basis); ``feasible`` False means empty."""

    side: str
    dim: int
    feasible: bool
    particular: Optional[RMatrix] = None
    basis: Tuple[RMatrix, ...] = ()

    @property
    def free_dim(self) -> int:
        return len(self.basis)

    @classmethod
    def infeasible(cls, side: str, dim: int) -> "SolutionSpace":
        return cls(side=side, dim=dim, feasible=False)


@dataclass(frozen=True)
class Classification:
    side: str
    kind: Kind
    residue: Multivector
    jacobi_condition: Multivector
    contraction_defect: Multivector

    @property
    def is_coboundary_consistent(self) -> bool:
        return self.kind is not Kind.NOT_COBOUNDARY_CONSISTENT


@dataclass(frozen=True)
class Equivalence:
    """Outcome of comparing two coboundary structures through an automorphism C.

    ``delta`` is CᵀrC − r' and ``defects`` maps each failing basis index to
    the nonzero matrix 𝒳'ᵢᵀΔ + Δ𝒳'ᵢ + β'ᵢΔ.
    """

    equivalent: bool
    intertwines: bool
    delta: RMatrix
    defects: Mapping[int, sympy.ImmutableMatrix]
