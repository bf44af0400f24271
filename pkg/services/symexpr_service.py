"""
Symbolic Expression Service — parse, differentiate, evaluate, render
=====================================================================
Operations over ``models.expression`` trees. Differentiation and
evaluation dispatch on node type (``functools.singledispatch``); numeric
evaluation is vectorised with numpy so a 100-point sample is one pass.

Semantic equality is decided by sampling (``numerically_equal``); sympy is
used only where exact identities or closed-form integration are needed
(``to_sympy`` / ``from_sympy``).
"""

import logging
from fractions import Fraction
from functools import singledispatch
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import sympy

from models.expression import (
    ONE, ZERO, Add, Expression, Func, Mul, Neg, Num, ParseContext, Pow, Sym,
    add, coerce, func, mul, neg, num, power,
)
from services import expression_parser
from utils.validators import StructuralError, UnsupportedChartError

logger = logging.getLogger(__name__)

Binding = Mapping[str, Union[float, Fraction, np.ndarray]]


def parse(src: str, context: ParseContext = ParseContext(), field: str = "expr") -> Expression:
    return expression_parser.parse(src, context, field=field)


# ── Differentiation ──────────────────────────────────────────────────

@singledispatch
def differentiate(e: Expression, var: str) -> Expression:
    raise NotImplementedError(f"Cannot differentiate a {type(e).__name__}")


@differentiate.register(Num)
def _(e, var):
    return ZERO


@differentiate.register(Sym)
def _(e, var):
    return ONE if e.name == var else ZERO


@differentiate.register(Neg)
def _(e, var):
    return neg(differentiate(e.operand, var))


@differentiate.register(Add)
def _(e, var):
    return add(*(differentiate(t, var) for t in e.terms))


@differentiate.register(Mul)
def _(e, var):
    terms = []
    for i, factor in enumerate(e.factors):
        d = differentiate(factor, var)
        if d == ZERO:
            continue
        terms.append(mul(*e.factors[:i], d, *e.factors[i + 1:]))
    return add(*terms)


@differentiate.register(Pow)
def _(e, var):
    d = differentiate(e.base, var)
    if d == ZERO:
        return ZERO
    return mul(num(e.exponent), power(e.base, e.exponent - 1), d)


_CHAIN = {
    "exp": lambda u: func("exp", u),
    "sinh": lambda u: func("cosh", u),
    "cosh": lambda u: func("sinh", u),
    "sin": lambda u: func("cos", u),
    "cos": lambda u: neg(func("sin", u)),
}


@differentiate.register(Func)
def _(e, var):
    d = differentiate(e.arg, var)
    if d == ZERO:
        return ZERO
    return mul(_CHAIN[e.name](e.arg), d)


def gradient(e: Expression, coords: Sequence[str]) -> List[Expression]:
    return [differentiate(e, c) for c in coords]


# ── Numeric evaluation ───────────────────────────────────────────────

_NUMPY_FUNCS = {"exp": np.exp, "sinh": np.sinh, "cosh": np.cosh, "sin": np.sin, "cos": np.cos}


@singledispatch
def _numeric(e: Expression, env: Binding):
    raise NotImplementedError(type(e).__name__)


@_numeric.register(Num)
def _(e, env):
    return float(e.value)


@_numeric.register(Sym)
def _(e, env):
    try:
        value = env[e.name]
    except KeyError:
        raise StructuralError(e.name, "name is not bound for evaluation")
    return float(value) if isinstance(value, (int, Fraction)) else value


@_numeric.register(Neg)
def _(e, env):
    return -_numeric(e.operand, env)


@_numeric.register(Add)
def _(e, env):
    total = 0.0
    for t in e.terms:
        total = total + _numeric(t, env)
    return total


@_numeric.register(Mul)
def _(e, env):
    total = 1.0
    for f in e.factors:
        total = total * _numeric(f, env)
    return total


@_numeric.register(Pow)
def _(e, env):
    return np.power(_numeric(e.base, env), float(e.exponent))


@_numeric.register(Func)
def _(e, env):
    return _NUMPY_FUNCS[e.name](_numeric(e.arg, env))


# (value, scale): scale sums |terms| at every Add, so |value| / scale bounds
# the cancellation a residual went through.

@singledispatch
def _scaled(e: Expression, env: Binding):
    raise NotImplementedError(type(e).__name__)


@_scaled.register(Num)
@_scaled.register(Sym)
def _(e, env):
    value = _numeric(e, env)
    return value, np.abs(value)


@_scaled.register(Neg)
def _(e, env):
    value, scale = _scaled(e.operand, env)
    return -value, scale


@_scaled.register(Add)
def _(e, env):
    value, scale = 0.0, 0.0
    for t in e.terms:
        v, s = _scaled(t, env)
        value, scale = value + v, scale + s
    return value, scale


@_scaled.register(Mul)
def _(e, env):
    value, scale = 1.0, 1.0
    for f in e.factors:
        v, s = _scaled(f, env)
        value, scale = value * v, scale * s
    return value, scale


@_scaled.register(Pow)
def _(e, env):
    v, s = _scaled(e.base, env)
    value = np.power(v, float(e.exponent))
    if e.exponent < 0:
        # 1/v inherits the relative error s/|v| of its base, raised with the power.
        return value, np.abs(value) * np.power(s / np.abs(v), float(-e.exponent))
    return value, np.power(s, float(e.exponent))


@_scaled.register(Func)
def _(e, env):
    v, s = _scaled(e.arg, env)
    value = _NUMPY_FUNCS[e.name](v)
    return value, np.abs(value) * np.maximum(1.0, s)


def evaluate_array(e: Expression, env: Binding) -> np.ndarray:
    """Evaluate on numpy arrays of coordinates; overflow yields inf, never raises."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value = _numeric(e, env)
    return np.asarray(value, dtype=float)


def evaluate(e: Expression, point: Binding, params: Optional[Binding] = None) -> float:
    """IEEE double evaluation; overflow is reported as infinity with a warning."""
    env = dict(params or {})
    env.update(point)
    value = float(evaluate_array(e, env))
    if np.isinf(value):
        logger.warning("evaluation overflow [expr=%s] point=%s", render(e), dict(point))
    return value


@singledispatch
def evaluate_exact(e: Expression, binding: Mapping[str, Fraction]) -> Fraction:
    """Exact rational value of a function-free expression."""
    raise NotImplementedError(type(e).__name__)


@evaluate_exact.register(Num)
def _(e, binding):
    return e.value


@evaluate_exact.register(Sym)
def _(e, binding):
    if e.name not in binding:
        raise StructuralError(e.name, "parameter is not bound")
    return Fraction(binding[e.name])


@evaluate_exact.register(Neg)
def _(e, binding):
    return -evaluate_exact(e.operand, binding)


@evaluate_exact.register(Add)
def _(e, binding):
    return sum((evaluate_exact(t, binding) for t in e.terms), Fraction(0))


@evaluate_exact.register(Mul)
def _(e, binding):
    total = Fraction(1)
    for f in e.factors:
        total *= evaluate_exact(f, binding)
    return total


@evaluate_exact.register(Pow)
def _(e, binding):
    base = evaluate_exact(e.base, binding)
    if base == 0 and e.exponent < 0:
        raise ZeroDivisionError(f"zero denominator in {render(e)}")
    return base ** e.exponent


@evaluate_exact.register(Func)
def _(e, binding):
    arg = evaluate_exact(e.arg, binding)
    if arg == 0:
        return Fraction(1) if e.name in ("exp", "cosh", "cos") else Fraction(0)
    raise StructuralError(render(e), "transcendental value has no exact rational form")


# ── Structure ────────────────────────────────────────────────────────

@singledispatch
def free_names(e: Expression) -> FrozenSet[str]:
    raise NotImplementedError(type(e).__name__)


@free_names.register(Num)
def _(e):
    return frozenset()


@free_names.register(Sym)
def _(e):
    return frozenset((e.name,))


@free_names.register(Neg)
def _(e):
    return free_names(e.operand)


@free_names.register(Add)
@free_names.register(Mul)
def _(e):
    children = e.terms if isinstance(e, Add) else e.factors
    return frozenset().union(*(free_names(c) for c in children))


@free_names.register(Pow)
def _(e):
    return free_names(e.base)


@free_names.register(Func)
def _(e):
    return free_names(e.arg)


def is_literal_zero(e: Expression) -> bool:
    return isinstance(e, Num) and e.value == 0


def children(e: Expression) -> tuple:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Neg):
        return (e.operand,)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, Func):
        return (e.arg,)
    return ()


def denominators(e: Expression) -> List[Expression]:
    """Bases of every negative power, i.e. the quantities that must not vanish."""
    found = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Pow) and node.exponent < 0 and node.base not in found:
            found.append(node.base)
        stack.extend(children(node))
    return found


def substitute(e: Expression, name_or_map, replacement: Optional[Expression] = None) -> Expression:
    """Replace names by expressions. Accepts (name, expr) or a {name: expr} mapping."""
    mapping = name_or_map if replacement is None else {name_or_map: replacement}
    mapping = {k: coerce(v) for k, v in mapping.items()}
    return _rebuild(e, lambda s: mapping.get(s.name, s))


def simplify(e: Expression) -> Expression:
    """Re-run constant folding and flattening bottom-up; nothing more."""
    return _rebuild(e, lambda s: s)


def _rebuild(e: Expression, on_sym) -> Expression:
    if isinstance(e, Num):
        return e
    if isinstance(e, Sym):
        return on_sym(e)
    if isinstance(e, Neg):
        return neg(_rebuild(e.operand, on_sym))
    if isinstance(e, Add):
        return add(*(_rebuild(t, on_sym) for t in e.terms))
    if isinstance(e, Mul):
        return mul(*(_rebuild(f, on_sym) for f in e.factors))
    if isinstance(e, Pow):
        return power(_rebuild(e.base, on_sym), e.exponent)
    if isinstance(e, Func):
        return func(e.name, _rebuild(e.arg, on_sym))
    raise NotImplementedError(type(e).__name__)


def bind_params(e: Expression, params: Mapping[str, Fraction]) -> Expression:
    """Substitute rational parameter values, leaving only coordinates free."""
    return substitute(e, {k: Num(Fraction(v)) for k, v in params.items()})


# ── Rendering ────────────────────────────────────────────────────────

def _render_num(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _wrap(e: Expression, threshold: int) -> str:
    text = render(e)
    return f"({text})" if e.precedence < threshold else text


def render(e: Expression) -> str:
    """Grammar-conformant text: ``parse(render(e))`` evaluates like ``e``."""
    if isinstance(e, Num):
        return _render_num(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    if isinstance(e, Neg):
        inner = e.operand
        text = render(inner)
        if inner.precedence < 2 or isinstance(inner, Neg):
            text = f"({text})"
        return f"-{text}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{e.exponent}"
    if isinstance(e, Mul):
        parts = [_wrap(e.factors[0], 2)]
        parts += [_wrap(f, 3) for f in e.factors[1:]]
        return "*".join(parts)
    if isinstance(e, Add):
        out = render(e.terms[0]) if e.terms[0].precedence > 1 else f"({render(e.terms[0])})"
        for term in e.terms[1:]:
            negated = _negated(term)
            if negated is not None:
                out += " - " + _wrap(negated, 2)
            else:
                out += " + " + _wrap(term, 2)
        return out
    raise NotImplementedError(type(e).__name__)


def _negated(term: Expression) -> Optional[Expression]:
    if isinstance(term, Neg):
        return term.operand
    if isinstance(term, Num) and term.value < 0:
        return Num(-term.value)
    if isinstance(term, Mul) and isinstance(term.factors[0], Num) and term.factors[0].value < 0:
        return mul(Num(-term.factors[0].value), *term.factors[1:])
    return None


# ── sympy bridge ─────────────────────────────────────────────────────

_SYMPY_FUNCS = {"exp": sympy.exp, "sinh": sympy.sinh, "cosh": sympy.cosh,
                "sin": sympy.sin, "cos": sympy.cos}


def sympy_symbol(name: str) -> sympy.Symbol:
    return sympy.Symbol(name, real=True)


def to_sympy(e: Expression) -> sympy.Expr:
    if isinstance(e, Num):
        return sympy.Rational(e.value.numerator, e.value.denominator)
    if isinstance(e, Sym):
        return sympy_symbol(e.name)
    if isinstance(e, Neg):
        return -to_sympy(e.operand)
    if isinstance(e, Add):
        return sympy.Add(*(to_sympy(t) for t in e.terms))
    if isinstance(e, Mul):
        return sympy.Mul(*(to_sympy(f) for f in e.factors))
    if isinstance(e, Pow):
        return sympy.Pow(to_sympy(e.base), e.exponent)
    if isinstance(e, Func):
        return _SYMPY_FUNCS[e.name](to_sympy(e.arg))
    raise NotImplementedError(type(e).__name__)


def from_sympy(obj) -> Expression:
    """Convert a sympy expression back into the mini-language.

    Raises UnsupportedChartError for anything outside it (logs, non-integer
    powers, unknown functions).
    """
    obj = sympy.sympify(obj)
    if obj.is_Rational:
        return Num(Fraction(int(obj.p), int(obj.q)))
    if obj is sympy.E:
        return func("exp", ONE)
    if obj.is_Symbol:
        return Sym(obj.name)
    if obj.is_Add:
        return add(*(from_sympy(a) for a in obj.args))
    if obj.is_Mul:
        return mul(*(from_sympy(a) for a in obj.args))
    if obj.is_Pow:
        base, exponent = obj.args
        if base is sympy.E:
            return func("exp", from_sympy(exponent))
        if not exponent.is_Integer:
            raise UnsupportedChartError(str(obj), "non-integer power is outside the expression language")
        return power(from_sympy(base), int(exponent))
    for name, cls in _SYMPY_FUNCS.items():
        if obj.func == cls:
            return func(name, from_sympy(obj.args[0]))
    raise UnsupportedChartError(str(obj), "not expressible in the expression language")


# ── Sampling & numeric comparison ────────────────────────────────────

def sample_points(coords: Sequence[str], count: int, seed: int,
                  low: float = -2.0, high: float = 2.0) -> Dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    values = rng.uniform(low, high, size=(count, len(coords)))
    return {c: values[:, i] for i, c in enumerate(coords)}


def relative_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    with np.errstate(invalid="ignore"):
        return np.abs(a - b) / scale


def max_discrepancy(e1: Expression, e2: Expression, env: Binding) -> float:
    """Largest relative difference of two expressions over the sampled env."""
    err = relative_error(evaluate_array(e1, env), evaluate_array(e2, env))
    if err.size and not np.all(np.isfinite(err)):
        return float("inf")
    return float(np.max(err)) if err.size else 0.0


def relative_residual(e: Expression, env: Binding) -> float:
    """Largest |e| over the sampled env, measured against the size of the terms it sums.

    Floating-point cancellation in an identically zero residual stays near
    machine epsilon however large e^{-σ} or the parameters make the terms.
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value, scale = _scaled(e, env)
        value = np.asarray(value, dtype=float)
        err = np.abs(value) / np.maximum(1.0, np.asarray(scale, dtype=float))
    if err.size and not np.all(np.isfinite(err)):
        return float("inf")
    return float(np.max(err)) if err.size else 0.0


def numerically_equal(e1: Expression, e2: Expression, coords: Sequence[str],
                      params: Optional[Mapping[str, Fraction]] = None,
                      samples: int = 100, seed: int = 0, tol: float = 1e-9,
                      low: float = -2.0, high: float = 2.0) -> bool:
    env = {k: float(v) for k, v in (params or {}).items()}
    env.update(sample_points(coords, samples, seed, low, high))
    return max_discrepancy(e1, e2, env) <= tol


def finite_difference(e: Expression, var: str, env: Binding, step: float = 1e-6) -> np.ndarray:
    """Central difference of ``e`` along ``var`` at the sampled env."""
    plus = dict(env)
    minus = dict(env)
    plus[var] = np.asarray(env[var]) + step
    minus[var] = np.asarray(env[var]) - step
    return (evaluate_array(e, plus) - evaluate_array(e, minus)) / (2 * step)


def sum_of(terms: Iterable[Expression]) -> Expression:
    return add(*terms)
