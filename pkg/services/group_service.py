"""Group Service — invariant vector fields, their validation, and the function σ.

Charts are the product-of-exponentials coordinates g = e^{x X1} e^{y X2} [e^{z X3}].
Left fields close with +f, right fields with −f:

    [X_i^L, X_j^L] = f_ij^k X_k^L,   [X_i^R, X_j^R] = −f_ij^k X_k^R
"""

import logging
import time
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from config import get_settings
from models.expression import ZERO, Expression, add, mul, neg, num
from models.geometry import Field, GroupChart, ScalarField
from models.lie import LieAlgebra, rational
from repositories import algebra_repo, chart_repo
from services import bialgebra_service
from services.lie_service import adjoint_matrices
from services.symexpr_service import (
    bind_params, differentiate, evaluate_array, evaluate_exact, free_names,
    from_sympy, relative_error, sample_points, sympy_symbol, to_sympy,
)
from utils.validators import (
    SingularityError, StructuralError, UnknownLabelError, UnsupportedChartError, ValidationResult,
)

logger = logging.getLogger(__name__)

# Algebras with shipped closed-form exponentials e^{x𝒳_i}.
CLOSED_EXPONENTIALS = ("A2", "II", "V", "VI_0", "VI_a")


# ── Vector fields ────────────────────────────────────────────────────

def apply_field(chart: GroupChart, A: Field, f: Expression) -> Expression:
    """A(f) = A^μ ∂_μ f."""
    return add(*(mul(a, differentiate(f, c)) for a, c in zip(A, chart.coords)))


def vf_commutator(chart: GroupChart, A: Field, B: Field) -> Field:
    """[A,B]^μ = A^ν∂_νB^μ − B^ν∂_νA^μ."""
    if len(A) != chart.dim or len(B) != chart.dim:
        raise StructuralError("field", f"fields must have {chart.dim} components")
    return tuple(add(apply_field(chart, A, b), neg(apply_field(chart, B, a))) for a, b in zip(A, B))


def combine(coefficients: Sequence[Fraction], fields: Sequence[Field]) -> Field:
    """Σ_k c_k X_k for rational c."""
    dim = len(fields[0])
    return tuple(
        add(*(mul(num(c), field[mu]) for c, field in zip(coefficients, fields) if c))
        for mu in range(dim)
    )


# ── Chart instantiation & parameters ─────────────────────────────────

def instantiate_chart(chart: GroupChart, params: Mapping[str, Fraction]) -> GroupChart:
    """Bind the chart parameters, leaving only coordinates free."""
    missing = set(chart.params) - set(params)
    if missing:
        raise StructuralError(chart.algebra, f"chart parameters {sorted(missing)} are not bound")
    bound = {p: params[p] for p in chart.params}

    def bind(fields):
        return tuple(tuple(bind_params(c, bound) for c in field) for field in fields)

    return GroupChart(algebra=chart.algebra, coords=chart.coords, XL=bind(chart.XL),
                      XR=bind(chart.XR), params=(), line=chart.line)


def chart_expressions(chart: GroupChart) -> List[Expression]:
    return [c for fields in (chart.XL, chart.XR) for field in fields for c in field]


def chart_parameter_samples(chart: GroupChart, count: int, seed: int) -> List[Dict[str, Fraction]]:
    """Admissible parameter bindings for a chart, honouring its algebra's constraints."""
    if not chart.params:
        return [{}]
    name, _ = algebra_repo.parse_algebra_ref(chart.algebra)
    constraints = ()
    try:
        algebra = algebra_repo.get_algebra(name)
        if algebra.params == chart.params:
            constraints = algebra.constraints
    except UnknownLabelError:
        logger.debug("chart %s has no matching algebra constraints", chart.algebra)
    guards = bialgebra_service.guard_expressions(chart_expressions(chart))
    return bialgebra_service.sample_values(chart.params, count, seed, constraints,
                                           guards=guards, label=chart.algebra)


# ── Validation ───────────────────────────────────────────────────────

def check_identity_normalization(chart: GroupChart, params: Optional[Mapping[str, Fraction]] = None) -> ValidationResult:
    """XL_i(e) = XR_i(e) = e_i exactly."""
    result = ValidationResult()
    binding = {c: Fraction(0) for c in chart.coords}
    binding.update({k: Fraction(v) for k, v in (params or {}).items()})
    for label, fields in (("XL", chart.XL), ("XR", chart.XR)):
        for i, field in enumerate(fields):
            for mu, component in enumerate(field):
                expected = Fraction(1 if i == mu else 0)
                value = evaluate_exact(component, binding)
                if value != expected:
                    result.add_error(f"{chart.algebra}:{label}{i + 1}[{chart.coords[mu]}]",
                                     f"expected {expected} at the identity, got {value}")
    return result


def _environment(chart: GroupChart, params, samples: int, seed: int) -> Dict[str, np.ndarray]:
    settings = get_settings()
    env: Dict[str, object] = {k: float(v) for k, v in (params or {}).items()}
    env.update(sample_points(chart.coords, samples, seed, settings.point_low, settings.point_high))
    return env


def _field_residual(lhs: Field, rhs: Field, env) -> float:
    worst = 0.0
    for a, b in zip(lhs, rhs):
        err = relative_error(evaluate_array(a, env), evaluate_array(b, env))
        if err.size and not np.all(np.isfinite(err)):
            return float("inf")
        worst = max(worst, float(np.max(err)) if err.size else 0.0)
    return worst


def check_commutator_closure(chart: GroupChart, g: LieAlgebra,
                             params: Optional[Mapping[str, Fraction]] = None,
                             samples: Optional[int] = None, seed: Optional[int] = None,
                             tol: Optional[float] = None) -> ValidationResult:
    """Left fields close with +f, right fields with −f, at sampled points."""
    settings = get_settings()
    samples = samples or settings.samples
    seed = settings.seed if seed is None else seed
    tol = settings.tol if tol is None else tol
    if g.dim != chart.dim:
        raise StructuralError(chart.algebra, f"chart dimension {chart.dim} does not match {g.name}")
    env = _environment(chart, params, samples, seed)
    result = ValidationResult()
    for i, j in combinations(range(g.dim), 2):
        row = [g.f[i][j][k] for k in range(g.dim)]
        for label, fields, sign in (("XL", chart.XL, 1), ("XR", chart.XR, -1)):
            lhs = vf_commutator(chart, fields[i], fields[j])
            rhs = combine([sign * c for c in row], fields)
            err = _field_residual(lhs, rhs, env)
            if not err <= tol:
                result.add_error(f"{chart.algebra}:[{label}{i + 1},{label}{j + 1}]",
                                 f"closure violated, max relative error {err:.3e}")
    return result


# ── Forms & reconstruction ───────────────────────────────────────────

def _sympy_fields(fields: Sequence[Field]) -> sympy.Matrix:
    return sympy.Matrix([[to_sympy(c) for c in field] for field in fields])


def left_forms(chart: GroupChart) -> sympy.Matrix:
    """L[i, μ] = L^i_μ, the forms dual to the left fields: (XL)^{-T}."""
    M = _sympy_fields(chart.XL)
    if sympy.simplify(M.det()) == 0:
        raise SingularityError(chart.algebra, "left field matrix is singular")
    return M.T.inv().applyfunc(sympy.simplify)


@lru_cache(maxsize=None)
def _exponentials(name: str, params: Tuple[Tuple[str, Fraction], ...], coords: Tuple[str, ...]):
    algebra = bialgebra_service.instantiate_algebra(algebra_repo.get_algebra(name), dict(params))
    X = adjoint_matrices(algebra).X
    mats = []
    for i, Xi in enumerate(X):
        t = sympy_symbol(coords[i])
        mats.append(sympy.ImmutableMatrix((t * sympy.Matrix(Xi)).exp().applyfunc(sympy.simplify)))
    return algebra, tuple(mats)


def closed_exponentials(name: str, params: Optional[Mapping[str, Fraction]] = None,
                        coords: Sequence[str] = ("x", "y", "z")) -> Tuple[sympy.ImmutableMatrix, ...]:
    """e^{x_i 𝒳_i} in closed form, generator i in coordinate coords[i]."""
    if name not in CLOSED_EXPONENTIALS:
        raise UnsupportedChartError(name, f"closed exponentials ship only for {', '.join(CLOSED_EXPONENTIALS)}")
    algebra = algebra_repo.get_algebra(name)
    coords = tuple(coords[:algebra.dim])
    binding = tuple(sorted((k, Fraction(v)) for k, v in (params or {}).items() if k in algebra.params))
    return _exponentials(name, binding, coords)[1]


def fields_from_exponentials(g: LieAlgebra, exponentials: Sequence[sympy.Matrix],
                             coords: Sequence[str] = ("x", "y", "z")) -> GroupChart:
    """Rebuild XL and XR from e^{x_i𝒳_i} through the Maurer–Cartan forms."""
    start = time.monotonic()
    n = g.dim
    coords = tuple(coords[:n])
    symbols = [sympy_symbol(c) for c in coords]
    X = adjoint_matrices(g).X
    for i, E in enumerate(exponentials):
        derivative = sympy.Matrix(E).diff(symbols[i]).subs(symbols[i], 0)
        if not (derivative - sympy.Matrix(X[i])).applyfunc(sympy.simplify).is_zero_matrix:
            raise StructuralError(f"{g.name}:exp{i + 1}", "exponential does not match the adjoint matrix")
    inverses = [sympy.Matrix(E).subs(symbols[i], -symbols[i]) for i, E in enumerate(exponentials)]
    left_rows, right_rows = [], []
    for mu in range(n):
        v = sympy.eye(n)[mu, :]
        for i in range(mu + 1, n):
            v = v * sympy.Matrix(exponentials[i])
        left_rows.append(v)
        w = sympy.eye(n)[mu, :]
        for i in range(mu - 1, -1, -1):
            w = w * inverses[i]
        right_rows.append(w)
    Lm, Rm = sympy.Matrix.vstack(*left_rows), sympy.Matrix.vstack(*right_rows)
    for label, M in (("left", Lm), ("right", Rm)):
        if sympy.simplify(M.det()) == 0:
            raise SingularityError(g.name, f"{label} form matrix is degenerate")
    XL = Lm.inv().applyfunc(sympy.simplify)
    XR = Rm.inv().applyfunc(sympy.simplify)

    def fields(M):
        return tuple(tuple(from_sympy(M[i, mu]) for mu in range(n)) for i in range(n))

    chart = GroupChart(algebra=g.name, coords=coords, XL=fields(XL), XR=fields(XR))
    logger.debug("fields_from_exponentials [algebra=%s] duration=%.1fms",
                 g.name, (time.monotonic() - start) * 1000)
    return chart


def compare_charts(a: GroupChart, b: GroupChart, samples: Optional[int] = None,
                   seed: Optional[int] = None, tol: Optional[float] = None) -> ValidationResult:
    """Componentwise numeric agreement of two parameter-free charts."""
    settings = get_settings()
    samples = samples or settings.samples
    seed = settings.seed if seed is None else seed
    tol = settings.tol if tol is None else tol
    env = _environment(a, None, samples, seed)
    result = ValidationResult()
    for label, fa, fb in (("XL", a.XL, b.XL), ("XR", a.XR, b.XR)):
        for i, (u, v) in enumerate(zip(fa, fb)):
            err = _field_residual(u, v, env)
            if not err <= tol:
                result.add_error(f"{a.algebra}:{label}{i + 1}", f"max relative error {err:.3e}")
    return result


# ── σ ────────────────────────────────────────────────────────────────

def sigma_function(chart: GroupChart, beta: Sequence[Fraction], side: str = "primal") -> ScalarField:
    """σ = x^μ ∫₀¹ β_i L^i_μ(t x) dt on a parameter-free chart.

    On the dual side ``beta`` carries the α coefficients.
    """
    if chart.params:
        raise StructuralError(chart.algebra, "bind chart parameters before computing sigma")
    if len(beta) != chart.dim:
        raise StructuralError("beta", f"expected {chart.dim} coefficients, got {len(beta)}")
    if not any(beta):
        return ScalarField(chart, ZERO)
    start = time.monotonic()
    L = left_forms(chart)
    t = sympy.Symbol("t", positive=True)
    symbols = [sympy_symbol(c) for c in chart.coords]
    scaled = {s: t * s for s in symbols}
    integrand = sympy.Integer(0)
    for mu, x in enumerate(symbols):
        form = sum((rational(b) * L[i, mu] for i, b in enumerate(beta) if b), sympy.Integer(0))
        integrand += x * form.subs(scaled, simultaneous=True)
    value = sympy.integrate(sympy.simplify(integrand), (t, 0, 1), conds="none")
    value = sympy.simplify(value)
    if value.has(sympy.Integral) or value.has(sympy.Piecewise):
        raise UnsupportedChartError(chart.algebra, f"sigma integrand {integrand} has no closed form")
    expr = from_sympy(value)
    if not free_names(expr) <= set(chart.coords):
        raise UnsupportedChartError(chart.algebra, f"sigma {value} depends on non-coordinate names")
    logger.debug("sigma_function [chart=%s, side=%s] sigma=%s duration=%.1fms",
                 chart.algebra, side, value, (time.monotonic() - start) * 1000)
    return ScalarField(chart, expr)


def load_charts(path=None) -> List[GroupChart]:
    return list(chart_repo.load_charts(path).values())
