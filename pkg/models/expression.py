"""
Expression trees
================
Immutable closed-form scalar expressions over chart coordinates and
catalog parameters: rational literals, names, sums, products, integer
powers, negation and the unary functions exp, sinh, cosh, sin, cos.

Nodes are built through the smart constructors at the bottom of this
module (``add``, ``mul``, ``neg``, ``power``, ``func``), which fold
constants and flatten nested sums/products. No other simplification is
attempted; semantic equality is decided numerically by the symexpr service.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple, Union

FUNCTIONS = ("exp", "sinh", "cosh", "sin", "cos")

Number = Union[int, Fraction]


class Expression:
    """Base node. Arithmetic operators route through the smart constructors."""

    precedence = 5

    def __add__(self, other):
        return add(self, coerce(other))

    def __radd__(self, other):
        return add(coerce(other), self)

    def __sub__(self, other):
        return add(self, neg(coerce(other)))

    def __rsub__(self, other):
        return add(coerce(other), neg(self))

    def __mul__(self, other):
        return mul(self, coerce(other))

    def __rmul__(self, other):
        return mul(coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __truediv__(self, other):
        return mul(self, power(coerce(other), -1))

    def __rtruediv__(self, other):
        return mul(coerce(other), power(self, -1))

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer exponents are supported")
        return power(self, exponent)

    def __str__(self):
        from services.symexpr_service import render
        return render(self)


@dataclass(frozen=True, eq=True, repr=True)
class Num(Expression):
    value: Fraction

    @property
    def precedence(self):
        # Negative or fractional literals need parentheses as factors.
        if self.value < 0 or self.value.denominator != 1:
            return 2
        return 5


@dataclass(frozen=True, eq=True, repr=True)
class Sym(Expression):
    name: str


@dataclass(frozen=True, eq=True, repr=True)
class Neg(Expression):
    operand: Expression
    precedence = 2


@dataclass(frozen=True, eq=True, repr=True)
class Add(Expression):
    terms: Tuple[Expression, ...]
    precedence = 1


@dataclass(frozen=True, eq=True, repr=True)
class Mul(Expression):
    factors: Tuple[Expression, ...]
    precedence = 2


@dataclass(frozen=True, eq=True, repr=True)
class Pow(Expression):
    base: Expression
    exponent: int
    precedence = 4


@dataclass(frozen=True, eq=True, repr=True)
class Func(Expression):
    name: str
    arg: Expression


ZERO = Num(Fraction(0))
ONE = Num(Fraction(1))


# ── Smart constructors ───────────────────────────────────────────────

def coerce(value) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, (int, Fraction)):
        return Num(Fraction(value))
    raise TypeError(f"cannot build an expression from {type(value).__name__}")


def num(value: Number) -> Num:
    return Num(Fraction(value))


def sym(name: str) -> Sym:
    return Sym(name)


def is_zero(e: Expression) -> bool:
    return isinstance(e, Num) and e.value == 0


def is_one(e: Expression) -> bool:
    return isinstance(e, Num) and e.value == 1


def add(*terms: Expression) -> Expression:
    flat = []
    constant = Fraction(0)
    for term in _flatten(terms, Add, "terms"):
        if isinstance(term, Num):
            constant += term.value
        else:
            flat.append(term)
    if constant != 0:
        flat.append(Num(constant))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors: Expression) -> Expression:
    flat = []
    constant = Fraction(1)
    for factor in _flatten(factors, Mul, "factors"):
        while isinstance(factor, Neg):
            constant = -constant
            factor = factor.operand
        if isinstance(factor, Num):
            constant *= factor.value
        elif isinstance(factor, Mul):
            for inner in factor.factors:
                if isinstance(inner, Num):
                    constant *= inner.value
                else:
                    flat.append(inner)
        else:
            flat.append(factor)
    if constant == 0:
        return ZERO
    if not flat:
        return Num(constant)
    if constant == -1:
        body = flat[0] if len(flat) == 1 else Mul(tuple(flat))
        return Neg(body)
    if constant != 1:
        flat.insert(0, Num(constant))
    if len(flat) == 1:
        return flat[0]
    return Mul(tuple(flat))


def neg(e: Expression) -> Expression:
    if isinstance(e, Num):
        return Num(-e.value)
    if isinstance(e, Neg):
        return e.operand
    if isinstance(e, Mul) and isinstance(e.factors[0], Num):
        return mul(Num(-e.factors[0].value), *e.factors[1:])
    return Neg(e)


def power(base: Expression, exponent: int) -> Expression:
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Num):
        if base.value == 0 and exponent < 0:
            raise ZeroDivisionError("zero denominator")
        return Num(base.value ** exponent)
    if isinstance(base, Pow):
        return power(base.base, base.exponent * exponent)
    if isinstance(base, Neg):
        inner = power(base.operand, exponent)
        return inner if exponent % 2 == 0 else neg(inner)
    return Pow(base, exponent)


def func(name: str, arg: Expression) -> Expression:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function '{name}'")
    if is_zero(arg):
        return ONE if name in ("exp", "cosh", "cos") else ZERO
    return Func(name, arg)


def exp(arg: Expression) -> Expression:
    return func("exp", arg)


def _flatten(items: Iterable[Expression], kind, attr: str):
    for item in items:
        if isinstance(item, kind):
            yield from _flatten(getattr(item, attr), kind, attr)
        else:
            yield item


@dataclass(frozen=True)
class ParseContext:
    """Names an expression may mention.

    ``coords`` are chart (or phase-space) coordinates; ``params`` are
    catalog parameters and ``let`` names; ``integers`` bind names usable as
    integer exponents (the ``n`` of a family of invariants).
    """

    coords: Tuple[str, ...] = ()
    params: Tuple[str, ...] = ()
    integers: Tuple[Tuple[str, int], ...] = ()

    def declares(self, name: str) -> bool:
        return name in self.coords or name in self.params or name in dict(self.integers)

    def with_params(self, *names: str) -> "ParseContext":
        return ParseContext(self.coords, self.params + tuple(n for n in names if n not in self.params),
                            self.integers)

    def with_integer(self, name: str, value: int) -> "ParseContext":
        return ParseContext(self.coords, self.params, self.integers + ((name, value),))
