"""Jacobi Service — the generalized Sklyanin bracket on a group chart.

For an r-matrix r and cocycle coefficients c (α on the group of g, β on
the dual group) the structure is

    Λ^{μν} = Σ_{i<j} r^{ij} [(XR_i^μ XR_j^ν − XR_j^μ XR_i^ν) − e^{−σ}(XL_i^μ XL_j^ν − XL_j^μ XL_i^ν)]
    E^μ    = −Σ_i c^i XR_i^μ

and the bracket is {f,h} = Λ^{μν}∂_μf ∂_νh + f E(h) − h E(f). All axiom
checks differentiate symbolically and compare numerically at sampled points;
residuals are measured relative to the terms they sum (``relative_residual``).
"""

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config import get_settings
from models.bialgebra import Instance, JacobiLieBialgebra
from models.expression import ZERO, Expression, Sym, add, exp, mul, neg, num
from models.geometry import GoldenBrackets, GroupChart, JacobiStructure, ScalarField
from models.multivector import Multivector
from models.rmatrix import RMatrix
from repositories import bialgebra_repo, bracket_repo, chart_repo
from services import bialgebra_service, group_service
from services.exterior_service import ce_differential
from services.symexpr_service import (
    bind_params, differentiate, evaluate_array, finite_difference, max_discrepancy, relative_residual,
    sample_points,
)
from utils.validators import CatalogError, StructuralError, validate_side

logger = logging.getLogger(__name__)

Scalar = Union[Expression, ScalarField]
Pair = Tuple[str, str]


@dataclass(frozen=True)
class AxiomReport:
    """Worst violations of [Λ,Λ] = 2E∧Λ and [E,Λ] = 0 at the sampled points, relative by default."""

    lambda_lambda: float
    e_lambda: float

    @property
    def worst(self) -> float:
        return max(self.lambda_lambda, self.e_lambda)


def _expr(f: Scalar) -> Expression:
    return f.expr if isinstance(f, ScalarField) else f


# ── Construction ─────────────────────────────────────────────────────

def build_jacobi_structure(chart: GroupChart, r: RMatrix, cocycle: Sequence[Fraction],
                           sigma: ScalarField, side: str = "primal",
                           conformal: bool = True) -> JacobiStructure:
    """(Λ, E) from r and the cocycle coefficients.

    ``conformal=False`` drops the e^{−σ} factor; only mutation tests use it.
    """
    validate_side(side)
    n = chart.dim
    if r.dim != n or len(cocycle) != n:
        raise StructuralError(chart.algebra, f"r ({r.dim}) and cocycle ({len(cocycle)}) must match chart dimension {n}")
    if r.side != side:
        raise StructuralError("r", f"a {side} structure needs a {side} r-matrix, got {r.side}")
    factor = exp(neg(sigma.expr)) if conformal else num(1)
    XL, XR = chart.XL, chart.XR
    Lam = [[ZERO] * n for _ in range(n)]
    for mu, nu in combinations(range(n), 2):
        terms = []
        for i, j in combinations(range(n), 2):
            rij = r.entry(i, j)
            if rij == 0:
                continue
            right = add(mul(XR[i][mu], XR[j][nu]), neg(mul(XR[j][mu], XR[i][nu])))
            left = add(mul(XL[i][mu], XL[j][nu]), neg(mul(XL[j][mu], XL[i][nu])))
            terms.append(mul(num(rij), add(right, neg(mul(factor, left)))))
        Lam[mu][nu] = add(*terms)
        Lam[nu][mu] = neg(Lam[mu][nu])
    E = tuple(
        neg(add(*(mul(num(c), XR[i][mu]) for i, c in enumerate(cocycle) if c)))
        for mu in range(n)
    )
    return JacobiStructure(chart=chart, Lambda=tuple(tuple(row) for row in Lam), E=E,
                           sigma=sigma, side=side, cocycle=tuple(Fraction(c) for c in cocycle))


def jacobi_bracket(js: JacobiStructure, f: Scalar, h: Scalar) -> ScalarField:
    """{f,h} = Λ(df,dh) + f E(h) − h E(f)."""
    f, h = _expr(f), _expr(h)
    coords = js.chart.coords
    df = [differentiate(f, c) for c in coords]
    dh = [differentiate(h, c) for c in coords]
    n = len(coords)
    terms = [mul(js.Lambda[mu][nu], df[mu], dh[nu])
             for mu in range(n) for nu in range(n) if mu != nu]
    Ef = add(*(mul(e, d) for e, d in zip(js.E, df)))
    Eh = add(*(mul(e, d) for e, d in zip(js.E, dh)))
    return ScalarField(js.chart, add(*terms, mul(f, Eh), neg(mul(h, Ef))))


def coordinate_brackets(js: JacobiStructure) -> Dict[Pair, Expression]:
    coords = js.chart.coords
    return {(a, b): jacobi_bracket(js, Sym(a), Sym(b)).expr for a, b in combinations(coords, 2)}


# ── Sampling helpers ─────────────────────────────────────────────────

def _env(coords: Sequence[str], samples: Optional[int], seed: Optional[int]):
    settings = get_settings()
    samples = samples or settings.samples
    seed = settings.seed if seed is None else seed
    return sample_points(coords, samples, seed, settings.point_low, settings.point_high)


# ── Axioms ───────────────────────────────────────────────────────────

def structure_residuals(js: JacobiStructure) -> Tuple[Dict[tuple, Expression], Dict[tuple, Expression]]:
    """Expressions for [Λ,Λ] − 2E∧Λ (μ<ν<ρ) and [E,Λ] (μ<ν)."""
    coords = js.chart.coords
    n = len(coords)
    L, E = js.Lambda, js.E
    dL = [[[differentiate(L[a][b], c) for c in coords] for b in range(n)] for a in range(n)]
    dE = [[differentiate(E[a], c) for c in coords] for a in range(n)]

    def cyc(m, v, p):
        return ((m, v, p), (v, p, m), (p, m, v))

    lam_lam = {}
    for m, v, p in combinations(range(n), 3):
        terms = []
        for a, b, c in cyc(m, v, p):
            for s in range(n):
                terms.append(mul(L[s][a], dL[b][c][s]))
            terms.append(neg(mul(E[a], L[b][c])))
        lam_lam[(m, v, p)] = mul(num(2), add(*terms))
    e_lam = {}
    for m, v in combinations(range(n), 2):
        terms = []
        for s in range(n):
            terms.append(mul(E[s], dL[m][v][s]))
            terms.append(neg(mul(L[s][v], dE[m][s])))
            terms.append(neg(mul(L[m][s], dE[v][s])))
        e_lam[(m, v)] = add(*terms)
    return lam_lam, e_lam


def _max_abs(e: Expression, env) -> float:
    values = evaluate_array(e, env)
    if values.size and not np.all(np.isfinite(values)):
        return float("inf")
    return float(np.max(np.abs(values))) if values.size else 0.0


def verify_structure_axioms(js: JacobiStructure, samples: Optional[int] = None,
                            seed: Optional[int] = None, relative: bool = True) -> AxiomReport:
    """Axiom residuals at the sampled points.

    ``relative=False`` reports plain absolute values; the conformal-factor
    mutation uses it, where a violation is expected and its size matters.
    """
    env = _env(js.chart.coords, samples, seed)
    lam_lam, e_lam = structure_residuals(js)
    measure = relative_residual if relative else _max_abs
    report = AxiomReport(
        lambda_lambda=max((measure(e, env) for e in lam_lam.values()), default=0.0),
        e_lambda=max((measure(e, env) for e in e_lam.values()), default=0.0),
    )
    logger.debug("verify_structure_axioms [chart=%s, side=%s] [L,L]=%.2e [E,L]=%.2e",
                 js.chart.algebra, js.side, report.lambda_lambda, report.e_lambda)
    return report


def check_bracket_jacobi_identity(js: JacobiStructure, functions: Optional[Sequence[Expression]] = None,
                                  samples: Optional[int] = None, seed: Optional[int] = None) -> float:
    """Relative size of {f,{h,k}} + {h,{k,f}} + {k,{f,h}} over triples (coordinate functions by default)."""
    if functions is None:
        functions = [Sym(c) for c in js.chart.coords]
        if len(functions) == 2:
            functions.append(mul(functions[0], functions[1]))
    env = _env(js.chart.coords, samples, seed)
    worst = 0.0
    for f, h, k in combinations(functions, 3):
        total = add(
            jacobi_bracket(js, f, jacobi_bracket(js, h, k)).expr,
            jacobi_bracket(js, h, jacobi_bracket(js, k, f)).expr,
            jacobi_bracket(js, k, jacobi_bracket(js, f, h)).expr,
        )
        worst = max(worst, relative_residual(total, env))
    return worst


def check_leibniz_deviation(js: JacobiStructure, f: Scalar, h: Scalar, k: Scalar,
                            samples: Optional[int] = None, seed: Optional[int] = None) -> float:
    """Relative size of {f,hk} − h{f,k} − k{f,h} − hk E(f)."""
    f, h, k = _expr(f), _expr(h), _expr(k)
    Ef = add(*(mul(e, differentiate(f, c)) for e, c in zip(js.E, js.chart.coords)))
    deviation = add(
        jacobi_bracket(js, f, mul(h, k)).expr,
        neg(mul(h, jacobi_bracket(js, f, k).expr)),
        neg(mul(k, jacobi_bracket(js, f, h).expr)),
        neg(mul(h, k, Ef)),
    )
    return relative_residual(deviation, _env(js.chart.coords, samples, seed))


def check_intrinsic_derivative(js: JacobiStructure, b: JacobiLieBialgebra,
                               step: Optional[float] = None) -> float:
    """Max |∂_μΛ^{jk}(e) + (d X_μ)^{jk}| with d = d_{*X₀} (primal) or d_{φ₀} (dual)."""
    step = step or get_settings().fd_step
    coords = js.chart.coords
    n = len(coords)
    mode = "d_star_X0" if js.side == "primal" else "d_phi0"
    space = b.space(js.side)
    origin = {c: np.zeros(1) for c in coords}
    worst = 0.0
    for mu in range(n):
        expected = ce_differential(Multivector.basis(space, js.side, mu), mode, b)
        for j, k in combinations(range(n), 2):
            slope = float(np.ravel(finite_difference(js.Lambda[j][k], coords[mu], origin, step))[0])
            worst = max(worst, abs(slope + float(expected.coefficient(j, k))))
    return worst


def check_sharp_sigma(js: JacobiStructure, samples: Optional[int] = None,
                      seed: Optional[int] = None) -> float:
    """Relative size of Σ_μ Λ^{μν}∂_μσ − Σ_i c^i (XR_i^ν − e^{−σ} XL_i^ν)."""
    coords = js.chart.coords
    n = len(coords)
    sigma = js.sigma.expr
    dsigma = [differentiate(sigma, c) for c in coords]
    factor = exp(neg(sigma))
    env = _env(coords, samples, seed)
    worst = 0.0
    for nu in range(n):
        lhs = add(*(mul(js.Lambda[mu][nu], dsigma[mu]) for mu in range(n)))
        rhs = add(*(
            mul(num(c), add(js.chart.XR[i][nu], neg(mul(factor, js.chart.XL[i][nu]))))
            for i, c in enumerate(js.cocycle) if c
        ))
        worst = max(worst, relative_residual(add(lhs, neg(rhs)), env))
    return worst


# ── Golden tables ────────────────────────────────────────────────────

def compare_with_table(js: JacobiStructure, golden: Mapping[Pair, Expression],
                       samples: Optional[int] = None, seed: Optional[int] = None) -> Dict[Pair, float]:
    """Per-pair max relative error between computed and printed brackets."""
    env = _env(js.chart.coords, samples, seed)
    computed = coordinate_brackets(js)
    missing = [pair for pair in computed if pair not in golden]
    if missing:
        raise CatalogError("golden", f"missing coordinate pairs {missing}")
    return {pair: max_discrepancy(computed[pair], golden[pair], env) for pair in computed}


def compare_sigma(sigma: ScalarField, golden: Expression, samples: Optional[int] = None,
                  seed: Optional[int] = None) -> float:
    return max_discrepancy(sigma.expr, golden, _env(sigma.chart.coords, samples, seed))


def row_chart(instance: Instance, side: str) -> GroupChart:
    """Parameter-free chart of the group on ``side`` for a catalog row."""
    entry = instance.entry
    ref = entry.primal if side == "primal" else bialgebra_service.dual_ref(entry)
    chart = chart_repo.get_chart(ref)
    return group_service.instantiate_chart(chart, instance.binding)


def row_structure(instance: Instance, side: str, conformal: bool = True) -> JacobiStructure:
    """Jacobi structure of a catalog row on one side, σ computed from its cocycle."""
    validate_side(side)
    r = instance.printed(side)
    if r is None:
        raise StructuralError(instance.label, f"row has no printed {side} r-matrix")
    b = instance.bialgebra
    chart = row_chart(instance, side)
    cocycle = b.alpha if side == "primal" else b.beta
    sigma_coefficients = b.beta if side == "primal" else b.alpha
    sigma = group_service.sigma_function(chart, sigma_coefficients, side)
    return build_jacobi_structure(chart, r, cocycle, sigma, side, conformal)


def bracket_bindings(golden: GoldenBrackets, count: int, seed: int) -> List[Dict[str, Fraction]]:
    """Bindings for a golden row: r-parameters at 0, printed singular values avoided."""
    entry = bialgebra_repo.get_entry(golden.label)
    ref = entry.primal if golden.side == "primal" else bialgebra_service.dual_ref(entry)
    guards = [golden.sigma] + [e for _, e in golden.pairs]
    guards += group_service.chart_expressions(chart_repo.get_chart(ref))
    return bialgebra_service.sample_bindings(entry, count, seed, guards=guards, sample_rparams=False)


def golden_at(golden: GoldenBrackets, binding: Mapping[str, Fraction]) -> Tuple[Expression, Dict[Pair, Expression]]:
    return (bind_params(golden.sigma, binding),
            {pair: bind_params(e, binding) for pair, e in golden.pairs})


def check_golden_row(golden: GoldenBrackets, binding: Mapping[str, Fraction],
                     samples: Optional[int] = None, seed: Optional[int] = None) -> Dict[str, float]:
    """σ and bracket discrepancies of one golden row at one binding, keyed 'sigma' / 'x,y'."""
    start = time.monotonic()
    instance = bialgebra_service.instantiate(bialgebra_repo.get_entry(golden.label), binding)
    js = row_structure(instance, golden.side)
    sigma, pairs = golden_at(golden, binding)
    out = {"sigma": compare_sigma(js.sigma, sigma, samples, seed)}
    for pair, err in compare_with_table(js, pairs, samples, seed).items():
        out[",".join(pair)] = err
    logger.debug("check_golden_row [label=%s, side=%s] duration=%.1fms",
                 golden.label, golden.side, (time.monotonic() - start) * 1000)
    return out


def load_golden(label: Optional[str] = None, side: Optional[str] = None) -> List[GoldenBrackets]:
    if label is None:
        rows = bracket_repo.load_brackets()
        return [row for row in rows if side is None or row.side == side]
    return bracket_repo.get_brackets(label, side)
