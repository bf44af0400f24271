"""
Lie algebra models
==================
Structure constants are exact rationals indexed 0-based: ``f[i][j][k]`` is
f_ij^k. Reports and data files use 1-based indices; conversion happens
only in repositories and in ``utils.labels``.

Matrices (adjoint representations, automorphisms) are sympy immutable
matrices over the rationals.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

import sympy

from models.expression import Expression, Sym

Scalar = Fraction
Constants = Tuple[Tuple[Tuple[Fraction, ...], ...], ...]


def rational(value) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def fraction(value) -> Fraction:
    """sympy Rational (or int/Fraction) to Fraction; rejects anything inexact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    value = sympy.sympify(value)
    if not value.is_Rational:
        raise TypeError(f"{value!r} is not rational")
    return Fraction(int(value.p), int(value.q))


def to_matrix(rows: Sequence[Sequence]) -> sympy.ImmutableMatrix:
    return sympy.ImmutableMatrix([[rational(v) for v in row] for row in rows])


def zero_constants(dim: int):
    return [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]


def freeze(f) -> Constants:
    return tuple(tuple(tuple(Fraction(v) for v in row) for row in plane) for plane in f)


@dataclass(frozen=True)
class LieAlgebra:
    name: str
    dim: int
    f: Constants
    params: Tuple[Tuple[str, Fraction], ...] = ()

    @classmethod
    def from_constants(cls, name: str, dim: int,
                       constants: Mapping[Tuple[int, int, int], Fraction],
                       params: Mapping[str, Fraction] = None) -> "LieAlgebra":
        """Build from nonzero f_ij^k with i<j; the i>j half is completed by antisymmetry."""
        f = zero_constants(dim)
        for (i, j, k), value in constants.items():
            f[i][j][k] = Fraction(value)
            f[j][i][k] = -Fraction(value)
        return cls(name, dim, freeze(f), tuple(sorted((params or {}).items())))

    @classmethod
    def from_array(cls, name: str, f, params: Mapping[str, Fraction] = None) -> "LieAlgebra":
        """Wrap a full array as given (no antisymmetric completion)."""
        return cls(name, len(f), freeze(f), tuple(sorted((params or {}).items())))

    @classmethod
    def abelian(cls, dim: int, name: str = None) -> "LieAlgebra":
        return cls(name or f"abelian{dim}", dim, freeze(zero_constants(dim)))

    def constant(self, i: int, j: int, k: int) -> Fraction:
        return self.f[i][j][k]

    def nonzero(self) -> Dict[Tuple[int, int, int], Fraction]:
        return {
            (i, j, k): self.f[i][j][k]
            for i in range(self.dim) for j in range(i + 1, self.dim) for k in range(self.dim)
            if self.f[i][j][k] != 0
        }

    @property
    def is_abelian(self) -> bool:
        return not self.nonzero()

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Constraint:
    """Admissible-set condition on one parameter: ``a>0``, ``a!=1``, ``b>=0``, ``b<2``."""

    param: str
    op: str
    value: Fraction

    def holds(self, value: Fraction) -> bool:
        return {
            ">": value > self.value,
            ">=": value >= self.value,
            "<": value < self.value,
            "<=": value <= self.value,
            "!=": value != self.value,
        }[self.op]

    def __str__(self):
        return f"{self.param}{self.op}{self.value}"


@dataclass(frozen=True)
class ParametricAlgebra:
    """Catalog algebra whose constants may depend on parameters (e.g. VI_a)."""

    name: str
    dim: int
    params: Tuple[str, ...] = ()
    constraints: Tuple[Constraint, ...] = ()
    constants: Tuple[Tuple[Tuple[int, int, int], Expression], ...] = ()
    line: int = 0

    def renamed(self, mapping: Mapping[str, str]) -> "ParametricAlgebra":
        """Rebind parameter names, e.g. the ``[a=b]`` suffix of a dual algebra."""
        from services.symexpr_service import substitute

        if not mapping:
            return self
        exprs = {old: Sym(new) for old, new in mapping.items()}
        return ParametricAlgebra(
            name=self.name,
            dim=self.dim,
            params=tuple(mapping.get(p, p) for p in self.params),
            constraints=tuple(Constraint(mapping.get(c.param, c.param), c.op, c.value)
                              for c in self.constraints),
            constants=tuple((idx, substitute(e, exprs)) for idx, e in self.constants),
            line=self.line,
        )


@dataclass(frozen=True)
class AdjointRep:
    """Adjoint matrices of one side.

    ``X[i]`` has entries (𝒳_i)_j^k = −f_ij^k (row j, column k) and ``Y[k]``
    has entries (𝒴^k)_ij = −f_ij^k. Built from the dual constants the same
    formulas give 𝒳̃^i and 𝒴̃_k.
    """

    side: str
    X: Tuple[sympy.ImmutableMatrix, ...]
    Y: Tuple[sympy.ImmutableMatrix, ...]

    @property
    def dim(self) -> int:
        return len(self.X)


@dataclass(frozen=True)
class Automorphism:
    """C maps ``source`` onto ``target``: C X_i = C_i^j X'_j (row i, column j)."""

    source: LieAlgebra
    target: LieAlgebra
    C: sympy.ImmutableMatrix
    inverse: Optional[sympy.ImmutableMatrix] = field(default=None, compare=False)
