"""Integrable Service — constants of motion from a coboundary Jacobi-Lie bialgebra.

Phase-space functions S_i realise {S_i,S_j} = f_ij^k S_k + β_i S_j − β_j S_i
under a constant Poisson tensor. With c_j = S_i r^{ij} − α^j the matrix
Q = c_j 𝒳_j (adjoint representation) gives the constants I_k = tr Q^k.
Exact identities are decided by sympy expansion; sampled checks reuse the
expression evaluator.
"""

import logging
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.physics.quantum import TensorProduct

from config import get_settings
from models.bialgebra import JacobiLieBialgebra
from models.dynamics import DynamicalSystem, PhaseSpace, SystemSpec
from models.expression import Expression, ParseContext, add, mul, neg, num
from repositories import bialgebra_repo, system_repo
from services import bialgebra_service
from services.lie_service import adjoint_matrices
from services.symexpr_service import (
    bind_params, differentiate, evaluate_array, from_sympy, parse, sample_points, sympy_symbol, to_sympy,
)
from utils.validators import CatalogError, StructuralError, ValidationResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RelationReport:
    """S-bracket relations: sampled max residual, exact verdict and footnote violations."""

    max_residual: float
    exact: bool
    footnote: ValidationResult

    @property
    def ok(self) -> bool:
        return self.exact and self.footnote.is_valid


# ── Brackets ─────────────────────────────────────────────────────────

def poisson_bracket(ps: PhaseSpace, f: Expression, g: Expression) -> Expression:
    """ω^{μν} ∂_μf ∂_νg."""
    df = [differentiate(f, c) for c in ps.coords]
    dg = [differentiate(g, c) for c in ps.coords]
    terms = []
    for mu in range(ps.dim):
        for nu in range(ps.dim):
            w = ps.omega_inv[mu, nu]
            if w != 0:
                terms.append(mul(num(Fraction(int(w.p), int(w.q))), df[mu], dg[nu]))
    return add(*terms)


def _sympy_bracket(ps: PhaseSpace, f: sympy.Expr, g: sympy.Expr) -> sympy.Expr:
    symbols = [sympy_symbol(c) for c in ps.coords]
    total = sympy.Integer(0)
    for mu in range(ps.dim):
        for nu in range(ps.dim):
            w = ps.omega_inv[mu, nu]
            if w != 0:
                total += w * sympy.diff(f, symbols[mu]) * sympy.diff(g, symbols[nu])
    return total


def is_zero_polynomial(e) -> bool:
    value = to_sympy(e) if isinstance(e, Expression) else e
    return sympy.expand(value) == 0


# ── Construction ─────────────────────────────────────────────────────

def build_system(spec: SystemSpec, binding: Optional[Mapping[str, Fraction]] = None) -> DynamicalSystem:
    """Phase space, bialgebra and symbolic r of a system record; r-parameters stay free."""
    entry = bialgebra_repo.get_entry(spec.bialgebra)
    if entry.r is None:
        raise CatalogError(spec.name, f"{entry.label} has no primal r-matrix")
    if len(spec.coords) != len(spec.momenta):
        raise StructuralError(spec.name, "coords and momenta must pair up")
    binding = dict(binding or {})
    if entry.params and not set(entry.params) <= set(binding):
        binding.update(bialgebra_service.sample_bindings(entry, 1, get_settings().seed, sample_rparams=False)[0])
    instance = bialgebra_service.instantiate(entry, binding)
    bialg = instance.bialgebra
    if len(spec.S) != bialg.dim:
        raise StructuralError(spec.name, f"expected {bialg.dim} functions S_i, got {len(spec.S)}")
    phase = PhaseSpace.canonical(spec.coords, spec.momenta)
    context = ParseContext(coords=phase.coords)
    S = tuple(parse(text, context, field=f"{spec.name}:S{i + 1}") for i, text in enumerate(spec.S))
    fixed = {k: v for k, v in binding.items() if k not in entry.rparams}
    n = bialg.dim
    r = [[num(0)] * n for _ in range(n)]
    for (i, j), coef in entry.r:
        coef = bind_params(coef, fixed)
        r[i][j] = add(r[i][j], coef)
        r[j][i] = add(r[j][i], neg(coef))
    return DynamicalSystem(
        name=spec.name, bialg=bialg, r=tuple(tuple(row) for row in r), S=S, phase=phase,
        adjoint=adjoint_matrices(bialg.g), rparams=entry.rparams, spec=spec,
    )


def load_system(name: str) -> DynamicalSystem:
    return build_system(system_repo.get_system(name))


def perturbed(sys: DynamicalSystem, i: int, j: int, delta) -> DynamicalSystem:
    """Copy of ``sys`` with r^{ij} += delta (and r^{ji} −= delta), 0-based."""
    r = [list(row) for row in sys.r]
    r[i][j] = add(r[i][j], num(Fraction(delta)))
    r[j][i] = add(r[j][i], num(-Fraction(delta)))
    return replace(sys, r=tuple(tuple(row) for row in r))


def _r_sympy(sys: DynamicalSystem) -> sympy.Matrix:
    return sympy.Matrix([[to_sympy(e) for e in row] for row in sys.r])


def _S_sympy(sys: DynamicalSystem) -> List[sympy.Expr]:
    return [to_sympy(s) for s in sys.S]


def coefficients(sys: DynamicalSystem) -> List[sympy.Expr]:
    """c_j = Σ_i S_i r^{ij} − α^j."""
    r = _r_sympy(sys)
    S = _S_sympy(sys)
    n = sys.dim
    return [sympy.expand(sum((S[i] * r[i, j] for i in range(n)), sympy.Integer(0))
                         - sympy.Rational(sys.bialg.alpha[j]))
            for j in range(n)]


def build_Q(sys: DynamicalSystem) -> sympy.Matrix:
    """Q = Σ_j c_j 𝒳_j in the adjoint representation."""
    n = sys.dim
    Q = sympy.zeros(n, n)
    for c, X in zip(coefficients(sys), sys.adjoint.X):
        Q += c * sympy.Matrix(X)
    return Q


# ── S relations ──────────────────────────────────────────────────────

def check_footnote_condition(b: JacobiLieBialgebra) -> ValidationResult:
    """β_i f_jk^m + β_j f_ki^m + β_k f_ij^m = 0 for every index."""
    result = ValidationResult()
    f, be = b.f, b.beta
    n = b.dim
    for i, j, k in combinations(range(n), 3):
        for m in range(n):
            total = be[i] * f[j][k][m] + be[j] * f[k][i][m] + be[k] * f[i][j][m]
            if total:
                result.add_error(f"footnote({i + 1},{j + 1},{k + 1};{m + 1})", f"residual {total}")
    return result


def S_relation_residuals(sys: DynamicalSystem) -> Dict[Tuple[int, int], Expression]:
    """{S_i,S_j} − f_ij^k S_k − β_i S_j + β_j S_i for i<j (1-based keys)."""
    f, be = sys.bialg.f, sys.bialg.beta
    out = {}
    for i, j in combinations(range(sys.dim), 2):
        terms = [poisson_bracket(sys.phase, sys.S[i], sys.S[j])]
        terms += [neg(mul(num(f[i][j][k]), sys.S[k])) for k in range(sys.dim) if f[i][j][k]]
        if be[i]:
            terms.append(neg(mul(num(be[i]), sys.S[j])))
        if be[j]:
            terms.append(mul(num(be[j]), sys.S[i]))
        out[(i + 1, j + 1)] = add(*terms)
    return out


def _phase_env(sys: DynamicalSystem, samples: Optional[int], seed: Optional[int]):
    settings = get_settings()
    samples = samples or settings.samples
    seed = settings.seed if seed is None else seed
    env: Dict[str, object] = sample_points(sys.phase.coords, samples, seed,
                                           settings.point_low, settings.point_high)
    if sys.rparams:
        values = bialgebra_service.sample_values(sys.rparams, 1, seed, label=sys.name)[0]
        env.update({k: float(v) for k, v in values.items()})
    return env


def _max_abs(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size and not np.all(np.isfinite(values)):
        return float("inf")
    return float(np.max(np.abs(values))) if values.size else 0.0


def check_S_relations(sys: DynamicalSystem, samples: Optional[int] = None,
                      seed: Optional[int] = None) -> RelationReport:
    residuals = S_relation_residuals(sys)
    env = _phase_env(sys, samples, seed)
    worst = max((_max_abs(evaluate_array(e, env)) for e in residuals.values()), default=0.0)
    exact = all(is_zero_polynomial(e) for e in residuals.values())
    footnote = check_footnote_condition(sys.bialg)
    if not footnote.is_valid:
        logger.warning("footnote condition violated [system=%s]: %s", sys.name, "; ".join(footnote.messages()))
    return RelationReport(max_residual=worst, exact=exact, footnote=footnote)


# ── Constants of motion ──────────────────────────────────────────────

def constants_of_motion(sys: DynamicalSystem, k_max: int) -> List[Expression]:
    """I_k = tr Q^k for k = 1..k_max, expanded."""
    if k_max < 1:
        raise StructuralError("k_max", "k_max must be >= 1")
    start = time.monotonic()
    Q = build_Q(sys)
    power = sympy.eye(sys.dim)
    out = []
    for _ in range(k_max):
        power = (power * Q).applyfunc(sympy.expand)
        out.append(from_sympy(sympy.expand(power.trace())))
    logger.debug("constants_of_motion [system=%s] k_max=%d duration=%.1fms",
                 sys.name, k_max, (time.monotonic() - start) * 1000)
    return out


def hamiltonian(sys: DynamicalSystem, k: Optional[int] = None) -> Expression:
    """H = I_k, k defaulting to the system record's choice."""
    k = k or (sys.spec.hamiltonian if sys.spec else 2)
    return constants_of_motion(sys, k)[-1]


def conserved_check(sys: DynamicalSystem, H: Expression, f: Expression) -> bool:
    """{H, f} = 0 exactly."""
    return is_zero_polynomial(poisson_bracket(sys.phase, H, f))


def conserved_functions(sys: DynamicalSystem) -> Dict[str, Expression]:
    """Functions the system record declares conserved (names S1..Sn)."""
    out = {}
    for name in (sys.spec.conserved if sys.spec else ()):
        if not (name.startswith("S") and name[1:].isdigit() and 1 <= int(name[1:]) <= sys.dim):
            raise CatalogError(sys.name, f"unknown conserved function {name!r}")
        out[name] = sys.S[int(name[1:]) - 1]
    return out


def check_involution(ps: PhaseSpace, I: Sequence[Expression], samples: Optional[int] = None,
                     seed: Optional[int] = None, params: Optional[Mapping[str, float]] = None) -> float:
    """Max |{I_n, I_m}| over all pairs at sampled phase points."""
    settings = get_settings()
    env: Dict[str, object] = dict(params or {})
    env.update(sample_points(ps.coords, samples or settings.samples,
                             settings.seed if seed is None else seed,
                             settings.point_low, settings.point_high))
    worst = 0.0
    for a, b in combinations(I, 2):
        worst = max(worst, _max_abs(evaluate_array(poisson_bracket(ps, a, b), env)))
    return worst


def check_alpha_independence(I: Sequence[Expression], rparams: Sequence[str]) -> bool:
    """No constant of motion depends on a free r-parameter, after exact expansion."""
    names = {sympy_symbol(p) for p in rparams}
    return all(not (sympy.expand(to_sympy(e)).free_symbols & names) for e in I)


def check_invariant_formula(sys: DynamicalSystem, I: Sequence[Expression]) -> Dict[int, bool]:
    """I_k against the record's closed form in the integer n, exactly, per k."""
    if not sys.spec or not sys.spec.invariant:
        return {}
    base = ParseContext(coords=sys.phase.coords)
    out = {}
    for k, value in enumerate(I, start=1):
        expected = parse(sys.spec.invariant, base.with_integer("n", k), field=f"{sys.name}:invariant")
        out[k] = is_zero_polynomial(sympy.expand(to_sympy(value) - to_sympy(expected)))
    return out


# ── Generalized Yang–Baxter ──────────────────────────────────────────

def gcybe_residual(sys: DynamicalSystem) -> sympy.Matrix:
    """Σ{c_j,c_l} X_j⊗X_l + [Q⊗1 + 1⊗Q, R] + φ₀(Q) R with R = r^{ij} X_i⊗X_j."""
    n = sys.dim
    X = [sympy.Matrix(m) for m in sys.adjoint.X]
    c = coefficients(sys)
    r = _r_sympy(sys)
    eye = sympy.eye(n)
    R = sympy.zeros(n * n, n * n)
    for i in range(n):
        for j in range(n):
            if r[i, j] != 0:
                R += r[i, j] * TensorProduct(X[i], X[j])
    Q = build_Q(sys)
    total = sympy.zeros(n * n, n * n)
    for j in range(n):
        for l in range(n):
            bracket = sympy.expand(_sympy_bracket(sys.phase, c[j], c[l]))
            if bracket != 0:
                total += bracket * TensorProduct(X[j], X[l])
    lift = TensorProduct(Q, eye) + TensorProduct(eye, Q)
    total += lift * R - R * lift
    pairing = sum((sympy.Rational(b) * c[j] for j, b in enumerate(sys.bialg.beta) if b), sympy.Integer(0))
    total += pairing * R
    return total.applyfunc(sympy.expand)


def gcybe_violation(sys: DynamicalSystem, samples: Optional[int] = None,
                    seed: Optional[int] = None) -> float:
    """Max |entry| of the generalized Yang–Baxter residual at sampled phase points."""
    residual = gcybe_residual(sys)
    env = _phase_env(sys, samples, seed)
    worst = 0.0
    for entry in residual:
        if entry == 0:
            continue
        worst = max(worst, _max_abs(evaluate_array(from_sympy(entry), env)))
    return worst
