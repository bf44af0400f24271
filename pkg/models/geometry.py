"""
Group geometry models
=====================
Charts use exponential coordinates of the first kind per generator,
g = e^{x X1} e^{y X2} [e^{z X3}]. ``XL[i][mu]`` is the component of the
left invariant field X_i^L along d/d(coords[mu]); likewise ``XR``.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from models.expression import Expression

Field = Tuple[Expression, ...]


@dataclass(frozen=True)
class GroupChart:
    algebra: str
    coords: Tuple[str, ...]
    XL: Tuple[Field, ...]
    XR: Tuple[Field, ...]
    params: Tuple[str, ...] = ()
    line: int = 0

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class ScalarField:
    chart: GroupChart
    expr: Expression

    def __str__(self):
        return str(self.expr)


@dataclass(frozen=True)
class JacobiStructure:
    """(Λ, E) on a chart; ``Lambda[mu][nu]`` with Λ^{νμ} = −Λ^{μν} structurally."""

    chart: GroupChart
    Lambda: Tuple[Tuple[Expression, ...], ...]
    E: Field
    sigma: ScalarField
    side: str = "primal"
    cocycle: Tuple[Fraction, ...] = ()


@dataclass(frozen=True)
class GoldenBrackets:
    """Printed σ and coordinate brackets for one catalog row and side."""

    label: str
    side: str
    sigma: Expression
    pairs: Tuple[Tuple[Tuple[str, str], Expression], ...]
    params: Tuple[str, ...] = ()
    inconsistent: Tuple[Tuple[str, str], ...] = ()
    line: int = 0

    def pair_map(self) -> Dict[Tuple[str, str], Expression]:
        return dict(self.pairs)

    def flagged(self, pair: Tuple[str, str]) -> bool:
        return tuple(pair) in self.inconsistent
