"""
Multivector — homogeneous element of the exterior algebra over one side
========================================================================
Components map strictly increasing 0-based index tuples to exact
rationals; zero coefficients are never stored. ``space`` is the Lie
algebra whose bracket acts on this side: g for primal multivectors, the
dual algebra g* for dual ones.
"""

from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Tuple

from models.lie import LieAlgebra
from utils.validators import StructuralError

Key = Tuple[int, ...]


def sort_with_sign(indices: Iterable[int]) -> Tuple[int, Key]:
    """Sort ``indices`` returning (permutation sign, sorted key); sign 0 on repeats."""
    items = list(indices)
    if len(set(items)) != len(items):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


class Multivector:
    __slots__ = ("space", "side", "degree", "_components")

    def __init__(self, space: LieAlgebra, side: str, degree: int,
                 components: Mapping[Key, Fraction] = None):
        if degree < 0:
            raise StructuralError("degree", f"negative degree {degree}")
        cleaned: Dict[Key, Fraction] = {}
        for key, value in (components or {}).items():
            key = tuple(key)
            if len(key) != degree or any(not 0 <= i < space.dim for i in key):
                raise StructuralError("components", f"index {key} invalid for degree {degree}, dim {space.dim}")
            if any(key[a] >= key[a + 1] for a in range(len(key) - 1)):
                raise StructuralError("components", f"index {key} is not strictly increasing")
            value = Fraction(value)
            if value != 0:
                cleaned[key] = value
        self.space = space
        self.side = side
        self.degree = degree
        self._components = MappingProxyType(cleaned)

    # ── Constructors ────────────────────────────────────────────────

    @classmethod
    def from_terms(cls, space: LieAlgebra, side: str, degree: int,
                   terms: Mapping[Key, Fraction]) -> "Multivector":
        """Accumulate terms with unsorted keys, applying permutation signs."""
        acc: Dict[Key, Fraction] = {}
        for key, value in terms.items():
            sign, ordered = sort_with_sign(key)
            if sign == 0:
                continue
            acc[ordered] = acc.get(ordered, Fraction(0)) + sign * Fraction(value)
        return cls(space, side, degree, acc)

    @classmethod
    def zero(cls, space: LieAlgebra, side: str, degree: int) -> "Multivector":
        return cls(space, side, degree)

    @classmethod
    def scalar(cls, space: LieAlgebra, side: str, value) -> "Multivector":
        return cls(space, side, 0, {(): Fraction(value)})

    @classmethod
    def basis(cls, space: LieAlgebra, side: str, *indices: int) -> "Multivector":
        return cls.from_terms(space, side, len(indices), {tuple(indices): Fraction(1)})

    @classmethod
    def vector(cls, space: LieAlgebra, side: str, coefficients) -> "Multivector":
        return cls(space, side, 1, {(i,): c for i, c in enumerate(coefficients)})

    # ── Accessors ───────────────────────────────────────────────────

    @property
    def components(self) -> Mapping[Key, Fraction]:
        return self._components

    @property
    def dim(self) -> int:
        return self.space.dim

    def coefficient(self, *indices: int) -> Fraction:
        sign, key = sort_with_sign(indices)
        return sign * self._components.get(key, Fraction(0))

    @property
    def value(self) -> Fraction:
        """Degree-0 value."""
        if self.degree != 0:
            raise StructuralError("degree", "value is defined for scalars only")
        return self._components.get((), Fraction(0))

    def coefficients(self) -> Tuple[Fraction, ...]:
        """Degree-1 coefficient vector."""
        if self.degree != 1:
            raise StructuralError("degree", "coefficients are defined for vectors only")
        return tuple(self._components.get((i,), Fraction(0)) for i in range(self.dim))

    def is_zero(self) -> bool:
        return not self._components

    def items(self):
        return sorted(self._components.items())

    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self._components.values()), default=Fraction(0))

    # ── Linear structure ────────────────────────────────────────────

    def _check_compatible(self, other: "Multivector"):
        if not isinstance(other, Multivector):
            raise TypeError(f"expected Multivector, got {type(other).__name__}")
        if other.side != self.side or other.dim != self.dim:
            raise StructuralError("space", f"mixed spaces: {self.side}/{self.dim} vs {other.side}/{other.dim}")
        if other.degree != self.degree:
            raise StructuralError("degree", f"cannot add degree {self.degree} and {other.degree}")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check_compatible(other)
        acc = dict(self._components)
        for key, value in other._components.items():
            acc[key] = acc.get(key, Fraction(0)) + value
        return Multivector(self.space, self.side, self.degree, acc)

    def __neg__(self) -> "Multivector":
        return Multivector(self.space, self.side, self.degree,
                           {k: -v for k, v in self._components.items()})

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __mul__(self, scalar) -> "Multivector":
        scalar = Fraction(scalar)
        return Multivector(self.space, self.side, self.degree,
                           {k: scalar * v for k, v in self._components.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return (self.side == other.side and self.dim == other.dim
                and self.degree == other.degree
                and dict(self._components) == dict(other._components))

    def __hash__(self):
        return hash((self.side, self.dim, self.degree, frozenset(self._components.items())))

    def __repr__(self):
        return f"Multivector({self.side}, degree={self.degree}, {dict(self._components)})"

    def __str__(self):
        from utils.labels import render_multivector
        return render_multivector(self.side, self.degree, self._components)
