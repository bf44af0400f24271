"""Bialgebra Service — defining-equation checks, row instantiation, parameter sampling.

Catalog rows are parametric; everything downstream works on exact
instances obtained by binding every parameter to a small-denominator
rational inside its admissible set.
"""

import logging
import time
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import get_settings
from models.bialgebra import Instance, JacobiLieBialgebra, Monomials, ParametricEntry
from models.expression import Expression
from models.lie import Constraint, LieAlgebra, ParametricAlgebra
from models.multivector import Multivector
from models.rmatrix import RMatrix
from repositories import algebra_repo, bialgebra_repo
from services.symexpr_service import denominators, evaluate_exact
from utils.validators import CatalogError, StructuralError

logger = logging.getLogger(__name__)

CONDITIONS = ("mixed_cocycle", "alpha_beta", "alpha_f_beta_fdual", "alpha_fdual", "beta_f")

# Closest a sampled value may come to an excluded point or a vanishing denominator.
MARGIN = Fraction(1, 4)
SAMPLE_BOUND = 3
MAX_ATTEMPTS = 1000


# ── Defining equations ───────────────────────────────────────────────

def condition_residuals(b: JacobiLieBialgebra) -> Dict[str, Dict[tuple, Fraction]]:
    """Every nonzero component of the five defining equations, keyed by 1-based index tuple."""
    n = b.dim
    f, fd = b.g.f, b.dual.f
    al, be = b.alpha, b.beta
    zero = Fraction(0)

    def T(x, y):
        return sum((al[k] * f[x][k][y] for k in range(n)), zero)

    def delta(a, c):
        return 1 if a == c else 0

    out: Dict[str, Dict[tuple, Fraction]] = {name: {} for name in CONDITIONS}
    for i in range(n):
        for j in range(n):
            for m in range(n):
                for nn in range(n):
                    total = zero
                    for k in range(n):
                        total += (f[i][j][k] * fd[m][nn][k]
                                  - f[i][k][m] * fd[k][nn][j] - f[i][k][nn] * fd[m][k][j]
                                  - f[k][j][m] * fd[k][nn][i] - f[k][j][nn] * fd[m][k][i])
                    total += be[i] * fd[m][nn][j] - be[j] * fd[m][nn][i]
                    total += al[m] * f[i][j][nn] - al[nn] * f[i][j][m]
                    total += ((T(i, m) - al[m] * be[i]) * delta(j, nn)
                              - (T(j, m) - al[m] * be[j]) * delta(i, nn)
                              - (T(i, nn) - al[nn] * be[i]) * delta(j, m)
                              + (T(j, nn) - al[nn] * be[j]) * delta(i, m))
                    if total:
                        out["mixed_cocycle"][(i + 1, j + 1, m + 1, nn + 1)] = total
    pairing = sum((al[i] * be[i] for i in range(n)), zero)
    if pairing:
        out["alpha_beta"][()] = pairing
    for i in range(n):
        for m in range(n):
            total = sum((al[k] * f[k][i][m] - be[k] * fd[k][m][i] for k in range(n)), zero)
            if total:
                out["alpha_f_beta_fdual"][(i + 1, m + 1)] = total
    for m in range(n):
        for nn in range(n):
            total = sum((al[i] * fd[m][nn][i] for i in range(n)), zero)
            if total:
                out["alpha_fdual"][(m + 1, nn + 1)] = total
            total = sum((be[i] * f[m][nn][i] for i in range(n)), zero)
            if total:
                out["beta_f"][(m + 1, nn + 1)] = total
    return out


def verify_bialgebra_conditions(b: JacobiLieBialgebra) -> Dict[str, Fraction]:
    """Max |residual| per defining equation; all zero iff ``b`` is a Jacobi-Lie bialgebra."""
    return {
        name: max((abs(v) for v in comps.values()), default=Fraction(0))
        for name, comps in condition_residuals(b).items()
    }


def is_valid(b: JacobiLieBialgebra) -> bool:
    return not any(verify_bialgebra_conditions(b).values())


# ── Instantiation ────────────────────────────────────────────────────

def dual_ref(entry: ParametricEntry) -> str:
    if not entry.dual_rename:
        return entry.dual
    return f"{entry.dual}[{','.join(f'{a}={b}' for a, b in entry.dual_rename)}]"


def entry_algebras(entry: ParametricEntry) -> Tuple[ParametricAlgebra, ParametricAlgebra]:
    return algebra_repo.get_algebra(entry.primal), algebra_repo.get_algebra(dual_ref(entry))


def entry_constraints(entry: ParametricEntry) -> Tuple[Constraint, ...]:
    primal, dual = entry_algebras(entry)
    seen = []
    for c in primal.constraints + dual.constraints:
        if c not in seen:
            seen.append(c)
    return tuple(seen)


def entry_expressions(entry: ParametricEntry) -> List[Expression]:
    """Every parametric expression of a row, for denominator guarding."""
    primal, dual = entry_algebras(entry)
    exprs = list(entry.alpha) + list(entry.beta)
    exprs += [e for _, e in primal.constants] + [e for _, e in dual.constants]
    for monomials in (entry.r, entry.rdual, entry.residue, entry.residue_dual):
        exprs += [e for _, e in (monomials or ())]
    return exprs


def _exact(expr: Expression, binding: Mapping[str, Fraction], where: str) -> Fraction:
    try:
        return evaluate_exact(expr, binding)
    except ZeroDivisionError:
        raise CatalogError(where, f"parameter binding {dict(binding)} hits a zero denominator")


def instantiate_algebra(alg: ParametricAlgebra, binding: Mapping[str, Fraction]) -> LieAlgebra:
    constants = {idx: _exact(e, binding, alg.name) for idx, e in alg.constants}
    params = {p: Fraction(binding[p]) for p in alg.params if p in binding}
    return LieAlgebra.from_constants(alg.name, alg.dim, constants, params)


def _matrix(monomials: Optional[Monomials], side: str, dim: int, binding, where) -> Optional[RMatrix]:
    if monomials is None:
        return None
    upper: Dict[Tuple[int, int], Fraction] = {}
    for (i, j), coef in monomials:
        value = _exact(coef, binding, where)
        if i > j:
            i, j, value = j, i, -value
        upper[(i, j)] = upper.get((i, j), Fraction(0)) + value
    return RMatrix.from_upper(side, dim, upper)


def _trivector(monomials: Optional[Monomials], space: LieAlgebra, side: str, binding, where):
    if monomials is None:
        return None
    terms = {idx: _exact(coef, binding, where) for idx, coef in monomials}
    return Multivector.from_terms(space, side, 3, terms)


def check_binding(entry: ParametricEntry, binding: Mapping[str, Fraction]) -> None:
    missing = set(entry.params) - set(binding)
    if missing:
        raise CatalogError(entry.label, f"parameters {sorted(missing)} are not bound")
    for c in entry_constraints(entry):
        if not c.holds(Fraction(binding[c.param])):
            raise CatalogError(entry.label, f"binding {c.param}={binding[c.param]} violates {c}")
    for name, value in entry.excluded:
        if Fraction(binding[name]) == value:
            raise CatalogError(entry.label, f"{name}={value} is excluded")


def instantiate(entry: ParametricEntry, binding: Mapping[str, Fraction] = None) -> Instance:
    """Bind every parameter; free r-parameters default to 0."""
    binding = {k: Fraction(v) for k, v in (binding or {}).items()}
    for rp in entry.rparams:
        binding.setdefault(rp, Fraction(0))
    check_binding(entry, binding)
    primal_p, dual_p = entry_algebras(entry)
    g = instantiate_algebra(primal_p, binding)
    dual = instantiate_algebra(dual_p, binding)
    where = entry.label
    bialg = JacobiLieBialgebra(
        g=g,
        dual=dual,
        alpha=tuple(_exact(e, binding, where) for e in entry.alpha),
        beta=tuple(_exact(e, binding, where) for e in entry.beta),
        label=entry.label,
    )
    dim = entry.dim
    return Instance(
        entry=entry,
        binding=binding,
        bialgebra=bialg,
        r=_matrix(entry.r, "primal", dim, binding, where),
        rdual=_matrix(entry.rdual, "dual", dim, binding, where),
        residue=_trivector(entry.residue, g, "primal", binding, where),
        residue_dual=_trivector(entry.residue_dual, dual, "dual", binding, where),
        constraints=entry_constraints(entry),
    )


# ── Sampling ─────────────────────────────────────────────────────────

def _random_rational(rng: np.random.Generator, max_den: int) -> Fraction:
    q = int(rng.integers(1, max_den + 1))
    p = int(rng.integers(-SAMPLE_BOUND * q, SAMPLE_BOUND * q + 1))
    return Fraction(p, q)


def admissible_values(binding: Mapping[str, Fraction], constraints: Sequence[Constraint],
                      excluded: Sequence[Tuple[str, Fraction]] = (),
                      guards: Sequence[Expression] = ()) -> bool:
    """Inside every constraint, at least MARGIN from excluded points and zero denominators."""
    for c in constraints:
        if c.param not in binding:
            continue
        value = binding[c.param]
        if not c.holds(value):
            return False
        if c.op in ("!=", ">", "<") and abs(value - c.value) < MARGIN:
            return False
    for name, value in excluded:
        if abs(binding[name] - value) < MARGIN:
            return False
    for expr in guards:
        try:
            if abs(evaluate_exact(expr, binding)) < MARGIN:
                return False
        except ZeroDivisionError:
            return False
    return True


def admissible(entry: ParametricEntry, binding: Mapping[str, Fraction],
               guards: Sequence[Expression] = (), constraints: Sequence[Constraint] = None) -> bool:
    constraints = entry_constraints(entry) if constraints is None else constraints
    return admissible_values(binding, constraints, entry.excluded, guards)


def guard_expressions(exprs: Iterable[Expression]) -> List[Expression]:
    found: List[Expression] = []
    for expr in exprs:
        for den in denominators(expr):
            if den not in found:
                found.append(den)
    return found


def sample_values(names: Sequence[str], count: int, seed: int,
                  constraints: Sequence[Constraint] = (),
                  excluded: Sequence[Tuple[str, Fraction]] = (),
                  guards: Sequence[Expression] = (),
                  max_den: Optional[int] = None, label: str = "params") -> List[Dict[str, Fraction]]:
    """``count`` deterministic admissible rational bindings of ``names``."""
    if count < 1:
        raise CatalogError("count", "count must be >= 1")
    max_den = max_den or get_settings().max_denominator
    rng = np.random.default_rng(seed)
    bindings = []
    attempts = 0
    while len(bindings) < count:
        attempts += 1
        if attempts > MAX_ATTEMPTS:
            raise CatalogError(label, f"no admissible parameter values after {MAX_ATTEMPTS} attempts")
        binding = {name: _random_rational(rng, max_den) for name in names}
        if admissible_values(binding, constraints, excluded, guards):
            bindings.append(binding)
    return bindings


def sample_bindings(entry: ParametricEntry, count: int, seed: int,
                    guards: Iterable[Expression] = (), sample_rparams: bool = True,
                    max_den: Optional[int] = None) -> List[Dict[str, Fraction]]:
    """Deterministic admissible bindings. A row without parameters yields one binding."""
    if count < 1:
        raise CatalogError("count", "count must be >= 1")
    free = list(entry.params) + (list(entry.rparams) if sample_rparams else [])
    if not free:
        return [{rp: Fraction(0) for rp in entry.rparams}]
    guard_list = guard_expressions(list(entry_expressions(entry)) + list(guards))
    bindings = sample_values(free, count, seed, entry_constraints(entry), entry.excluded,
                             guard_list, max_den, entry.label)
    for binding in bindings:
        for rp in entry.rparams:
            binding.setdefault(rp, Fraction(0))
    return bindings


def sample_parameters(entry: ParametricEntry, count: int, seed: int,
                      guards: Iterable[Expression] = (), sample_rparams: bool = True) -> List[Instance]:
    """``count`` instances at deterministic admissible bindings (one if the row has no parameters)."""
    start = time.monotonic()
    instances = [instantiate(entry, b)
                 for b in sample_bindings(entry, count, seed, guards, sample_rparams)]
    logger.debug("sample_parameters [label=%s] count=%d duration=%.1fms",
                 entry.label, len(instances), (time.monotonic() - start) * 1000)
    return instances


def load_catalog(path=None) -> List[ParametricEntry]:
    return bialgebra_repo.load_catalog(path)


def basis_pairs(dim: int) -> List[Tuple[int, int]]:
    return list(combinations(range(dim), 2))
