"""
Jacobi-Lie bialgebra models
===========================
``JacobiLieBialgebra`` is a concrete (parameter-free) pair of dual Lie
algebras with the cocycle coefficients α (X₀ = α^i X_i) and β
(φ₀ = β_i X̃^i). ``ParametricEntry`` is one catalog row before its
parameters are bound; ``Instance`` is a row at one binding.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from models.expression import Expression
from models.lie import Constants, Constraint, LieAlgebra
from models.multivector import Multivector
from models.rmatrix import RMatrix
from utils.validators import StructuralError

Monomials = Tuple[Tuple[Tuple[int, ...], Expression], ...]


@dataclass(frozen=True)
class JacobiLieBialgebra:
    g: LieAlgebra
    dual: LieAlgebra
    alpha: Tuple[Fraction, ...]
    beta: Tuple[Fraction, ...]
    label: str = ""

    def __post_init__(self):
        dim = self.g.dim
        if self.dual.dim != dim or len(self.alpha) != dim or len(self.beta) != dim:
            raise StructuralError(
                self.label or "bialgebra",
                f"dimension mismatch: g={dim}, dual={self.dual.dim}, "
                f"alpha={len(self.alpha)}, beta={len(self.beta)}",
            )

    @property
    def dim(self) -> int:
        return self.g.dim

    @property
    def f(self) -> Constants:
        return self.g.f

    @property
    def f_dual(self) -> Constants:
        """f̃^{jk}_i stored as ``f_dual[j][k][i]``."""
        return self.dual.f

    @property
    def x0(self) -> Multivector:
        return Multivector.vector(self.g, "primal", self.alpha)

    @property
    def phi0(self) -> Multivector:
        return Multivector.vector(self.dual, "dual", self.beta)

    def space(self, side: str) -> LieAlgebra:
        return self.g if side == "primal" else self.dual

    def cocycle_on(self, side: str) -> Tuple[Fraction, ...]:
        """Coefficients of the cocycle living on ``side``: α for primal, β for dual."""
        return self.alpha if side == "primal" else self.beta

    def __str__(self):
        return self.label or f"(({self.g.name},phi0),({self.dual.name},X0))"


@dataclass(frozen=True)
class ParametricEntry:
    """One catalog row, every number still an expression in ``params``."""

    label: str
    group: str
    primal: str
    dual: str
    dual_rename: Tuple[Tuple[str, str], ...] = ()
    params: Tuple[str, ...] = ()
    rparams: Tuple[str, ...] = ()
    excluded: Tuple[Tuple[str, Fraction], ...] = ()
    alpha: Tuple[Expression, ...] = ()
    beta: Tuple[Expression, ...] = ()
    r: Optional[Monomials] = None
    rdual: Optional[Monomials] = None
    residue: Optional[Monomials] = None
    residue_dual: Optional[Monomials] = None
    inconsistent: Tuple[str, ...] = ()
    line: int = 0

    @property
    def dim(self) -> int:
        return len(self.alpha)

    def flagged(self, item: str) -> bool:
        return item in self.inconsistent

    def printed(self, side: str) -> Optional[Monomials]:
        return self.r if side == "primal" else self.rdual

    def printed_residue(self, side: str) -> Optional[Monomials]:
        return self.residue if side == "primal" else self.residue_dual

    @property
    def sides(self) -> Tuple[str, ...]:
        return tuple(s for s in ("primal", "dual") if self.printed(s) is not None)


@dataclass(frozen=True)
class Instance:
    """A catalog row at one parameter binding."""

    entry: ParametricEntry
    binding: Mapping[str, Fraction]
    bialgebra: JacobiLieBialgebra
    r: Optional[RMatrix] = None
    rdual: Optional[RMatrix] = None
    residue: Optional[Multivector] = None
    residue_dual: Optional[Multivector] = None
    constraints: Tuple[Constraint, ...] = field(default=(), compare=False)

    @property
    def label(self) -> str:
        return self.entry.label

    def printed(self, side: str) -> Optional[RMatrix]:
        return self.r if side == "primal" else self.rdual

    def printed_residue(self, side: str) -> Optional[Multivector]:
        return self.residue if side == "primal" else self.residue_dual

    def describe_binding(self) -> str:
        return ",".join(f"{k}={v}" for k, v in sorted(self.binding.items())) or "-"


def binding_dict(pairs) -> Dict[str, Fraction]:
    return {k: Fraction(v) for k, v in pairs}
