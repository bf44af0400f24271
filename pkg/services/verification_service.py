"""
Verification Service
====================
Runs the catalog sweeps behind each CLI command and turns their outcomes
into ``TaskRecord`` rows. Records come out in catalog order; a printed
entry flagged ``inconsistent`` that disagrees with the computed value is
reported as ``flagged`` instead of ``fail``.
"""

import logging
import time
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from config import get_settings
from models.bialgebra import Instance, ParametricEntry
from models.multivector import Multivector
from models.report import TaskRecord
from repositories import algebra_repo, automorphism_repo, bialgebra_repo, chart_repo, system_repo
from services import (
    bialgebra_service, group_service, integrable_service, jacobi_service, lie_service, rmatrix_service,
)
from services.exterior_service import check_cocycles
from services.symexpr_service import free_names, is_literal_zero, render
from utils.labels import (
    KIND_LABELS, render_binding, render_matrix, render_multivector, render_rational, render_vector,
)
from utils.validators import StructuralError, UnsupportedChartError, validate_side

logger = logging.getLogger(__name__)

# Mutated residual above which the conformal factor counts as essential.
MUTATION_THRESHOLD = 1e-2
# Central differences at the identity, with step fd_step.
FD_TOL = 1e-5


def _mv(P: Multivector) -> str:
    return render_multivector(P.side, P.degree, P.components)


def _status(ok: bool, flagged: bool = False) -> str:
    if ok:
        return "pass"
    return "flagged" if flagged else "fail"


def _record(task: str, label: str, side: str = "-", binding: Mapping[str, Fraction] = None,
            status: str = "pass", residuals: Mapping[str, float] = None,
            objects: Mapping[str, str] = None, notes: Sequence[str] = ()) -> TaskRecord:
    return TaskRecord(
        label=label, task=task, side=side, binding=render_binding(binding or {}),
        status=status, residuals=dict(residuals or {}), objects=dict(objects or {}), notes=list(notes),
    )


def row_bindings(entry: ParametricEntry, params: Optional[Mapping[str, Fraction]] = None,
                 count: Optional[int] = None, seed: Optional[int] = None,
                 sample_rparams: bool = False) -> List[Dict[str, Fraction]]:
    """The user's binding when given, otherwise ``count`` deterministic samples."""
    settings = get_settings()
    if params:
        return [dict(params)]
    return bialgebra_service.sample_bindings(
        entry, count or settings.param_samples, settings.seed if seed is None else seed,
        sample_rparams=sample_rparams,
    )


def _entries(label: Optional[str]) -> List[ParametricEntry]:
    if label is None:
        return bialgebra_service.load_catalog()
    return [bialgebra_repo.get_entry(label)]


# ── Catalog ──────────────────────────────────────────────────────────

def condition_records(instance: Instance) -> List[TaskRecord]:
    b = instance.bialgebra
    residuals = {name: float(abs(v)) for name, v in bialgebra_service.verify_bialgebra_conditions(b).items()}
    cocycles = check_cocycles(b)
    residuals.update({name: float(P.max_abs()) for name, P in cocycles.items()})
    ok = not any(residuals.values())
    return [_record("conditions", instance.label, binding=instance.binding, status=_status(ok),
                    residuals=residuals,
                    objects={"alpha": render_vector(b.alpha), "beta": render_vector(b.beta)})]


def coboundary_records(instance: Instance) -> List[TaskRecord]:
    out = []
    for side in instance.entry.sides:
        r = instance.printed(side)
        residual = rmatrix_service.coboundary_residual(instance.bialgebra, r, side)
        worst = max((abs(v) for plane in residual for row in plane for v in row), default=Fraction(0))
        item = "r" if side == "primal" else "rdual"
        flagged = instance.entry.flagged(item)
        notes = [f"printed {item} is marked inconsistent"] if flagged and worst else []
        if notes:
            logger.warning("%s: printed %s fails the coboundary equation [binding=%s]",
                           instance.label, item, render_binding(instance.binding))
        out.append(_record("coboundary", instance.label, side, instance.binding,
                           _status(worst == 0, flagged), {"max_residual": float(worst)},
                           {"r": _mv(r.to_bivector(instance.bialgebra.space(side)))}, notes))
    return out


def classification_records(instance: Instance) -> List[TaskRecord]:
    """Computed ϖ against the printed residue column (zero when not printed)."""
    out = []
    b = instance.bialgebra
    for side in instance.entry.sides:
        result = rmatrix_service.classify_r(b, instance.printed(side))
        printed = instance.printed_residue(side)
        if printed is None:
            printed = Multivector.zero(b.space(side), side, 3)
        mismatch = (result.residue - printed).max_abs()
        item = "residue" if side == "primal" else "residue_dual"
        flagged = instance.entry.flagged(item)
        notes = []
        if mismatch and flagged:
            notes.append(f"printed {item} {_mv(printed)} is marked inconsistent")
            logger.warning("%s: computed %s %s differs from printed %s",
                           instance.label, item, _mv(result.residue), _mv(printed))
        if not result.is_coboundary_consistent:
            notes.append("[X0, r] does not vanish")
        out.append(_record(
            "classify", instance.label, side, instance.binding, _status(mismatch == 0, flagged),
            {"residue_mismatch": float(mismatch), "jacobi_condition": float(result.jacobi_condition.max_abs())},
            {"kind": KIND_LABELS[result.kind.value], "residue": _mv(result.residue),
             "jacobi_condition": _mv(result.jacobi_condition), "w": _mv(result.contraction_defect)},
            notes,
        ))
    return out


def verify_catalog(label: Optional[str] = None, params: Optional[Mapping[str, Fraction]] = None,
                   count: Optional[int] = None, seed: Optional[int] = None) -> List[TaskRecord]:
    """Defining equations, printed r-matrices and printed residues of every row."""
    start = time.monotonic()
    records: List[TaskRecord] = []
    for entry in _entries(label):
        for binding in row_bindings(entry, params, count, seed, sample_rparams=True):
            instance = bialgebra_service.instantiate(entry, binding)
            records += condition_records(instance)
            records += coboundary_records(instance)
            records += classification_records(instance)
    failed = sum(r.failed for r in records)
    logger.info("verify_catalog records=%d failed=%d duration=%.0fms",
                len(records), failed, (time.monotonic() - start) * 1000)
    return records


# ── r-matrices ───────────────────────────────────────────────────────

def _printed_free_dim(entry: ParametricEntry, side: str) -> int:
    names = set()
    for _, coef in entry.printed(side) or ():
        names |= free_names(coef)
    return len(names & set(entry.rparams))


def solve_records(label: str, side: Optional[str] = None, params: Optional[Mapping[str, Fraction]] = None,
                  count: Optional[int] = None, seed: Optional[int] = None) -> List[TaskRecord]:
    """Solution spaces, with the printed r checked for membership and free dimension."""
    entry = bialgebra_repo.get_entry(label)
    sides = [validate_side(side)] if side else ["primal", "dual"]
    records = []
    for binding in row_bindings(entry, params, count, seed):
        instance = bialgebra_service.instantiate(entry, binding)
        b = instance.bialgebra
        for s in sides:
            space = rmatrix_service.solve_r(b, s)
            objects = {"feasible": str(space.feasible).lower(), "free_dim": str(space.free_dim)}
            if space.feasible:
                objects["particular"] = _mv(space.particular.to_bivector(b.space(s)))
                objects["basis"] = "; ".join(_mv(e.to_bivector(b.space(s))) for e in space.basis) or "-"
            printed = instance.printed(s)
            if printed is None:
                records.append(_record("solve", label, s, binding, "skip", objects=objects,
                                       notes=[f"no printed {s} r-matrix"]))
                continue
            coords = rmatrix_service.membership(space, printed) if space.feasible else None
            expected = _printed_free_dim(entry, s)
            notes = []
            if coords is None:
                notes.append("printed r-matrix is not in the solution space")
            else:
                objects["coordinates"] = render_vector(coords)
            if space.free_dim != expected:
                notes.append(f"free dimension {space.free_dim}, printed family has {expected}")
            records.append(_record("solve", label, s, binding, _status(not notes),
                                   {"free_dim_gap": float(abs(space.free_dim - expected))}, objects, notes))
    return records


def classify_records(label: str, params: Optional[Mapping[str, Fraction]] = None,
                     count: Optional[int] = None, seed: Optional[int] = None) -> List[TaskRecord]:
    entry = bialgebra_repo.get_entry(label)
    records = []
    for binding in row_bindings(entry, params, count, seed):
        records += classification_records(bialgebra_service.instantiate(entry, binding))
    return records


def equivalence_records(label1: str, label2: str, c_path, params: Optional[Mapping[str, Fraction]] = None,
                        seed: Optional[int] = None) -> List[TaskRecord]:
    """Check a supplied automorphism C between two rows at one shared binding."""
    rows = automorphism_repo.load_matrix(c_path)
    e1, e2 = bialgebra_repo.get_entry(label1), bialgebra_repo.get_entry(label2)
    b1 = row_bindings(e1, params, 1, seed)[0]
    if params:
        b2 = dict(params)
    elif set(e2.params) <= set(b1):
        b2 = {k: b1[k] for k in e2.params}
    else:
        b2 = row_bindings(e2, None, 1, seed)[0]
    i1 = bialgebra_service.instantiate(e1, b1)
    i2 = bialgebra_service.instantiate(e2, b2)
    if i1.r is None or i2.r is None:
        raise StructuralError("equiv", "both rows need a printed primal r-matrix")
    C = lie_service.make_automorphism(i1.bialgebra.g, i2.bialgebra.g, rows)
    check = lie_service.automorphism_check(C)
    result = rmatrix_service.check_equivalence(i1.bialgebra, i1.r, i2.bialgebra, i2.r, C)
    notes = check.messages()
    if not result.intertwines:
        notes.append("C does not carry the first bialgebra onto the second")
    notes += [f"defect at X{i}: {render_matrix(m)}" for i, m in sorted(result.defects.items())]
    objects = {
        "equivalent": str(result.equivalent).lower(),
        "C": render_matrix(C.C),
        "delta": _mv(result.delta.to_bivector(i2.bialgebra.g)),
    }
    return [_record("equivalence", f"{label1} ~ {label2}", "primal", {**b1, **b2},
                    "pass" if result.equivalent else "fail",
                    {"defects": float(len(result.defects))}, objects, notes)]


# ── Charts ───────────────────────────────────────────────────────────

def chart_records(samples: Optional[int] = None, seed: Optional[int] = None,
                  tol: Optional[float] = None) -> List[TaskRecord]:
    """Identity normalisation, commutator closure and closed-form reconstruction per chart."""
    settings = get_settings()
    seed = settings.seed if seed is None else seed
    records = []
    for name, chart in chart_repo.load_charts().items():
        algebra = algebra_repo.get_algebra(name)
        for params in group_service.chart_parameter_samples(chart, 1, seed):
            g = bialgebra_service.instantiate_algebra(algebra, params)
            identity = group_service.check_identity_normalization(chart, params)
            closure = group_service.check_commutator_closure(chart, g, params, samples, seed, tol)
            notes = identity.messages() + closure.messages()
            residuals = {"identity": float(len(identity)), "closure": float(len(closure))}
            if name in group_service.CLOSED_EXPONENTIALS:
                exps = group_service.closed_exponentials(name, params, chart.coords)
                rebuilt = group_service.fields_from_exponentials(g, exps, chart.coords)
                bound = group_service.instantiate_chart(chart, params)
                reconstruction = group_service.compare_charts(bound, rebuilt, samples, seed, tol)
                residuals["reconstruction"] = float(len(reconstruction))
                notes += reconstruction.messages()
            records.append(_record("charts", name, binding=params, status=_status(not notes),
                                   residuals=residuals, notes=notes))
    logger.info("chart_records charts=%d failed=%d", len(records), sum(r.failed for r in records))
    return records


# ── Brackets & axioms ────────────────────────────────────────────────

def bracket_records(label: Optional[str] = None, side: Optional[str] = None,
                    samples: Optional[int] = None, seed: Optional[int] = None,
                    tol: Optional[float] = None, count: int = 1) -> List[TaskRecord]:
    """Computed σ and coordinate brackets against the golden rows."""
    settings = get_settings()
    seed = settings.seed if seed is None else seed
    tol = settings.tol if tol is None else tol
    side = validate_side(side) if side else None
    records = []
    for golden in jacobi_service.load_golden(label, side):
        for binding in jacobi_service.bracket_bindings(golden, count, seed):
            try:
                errors = jacobi_service.check_golden_row(golden, binding, samples, seed)
            except UnsupportedChartError as e:
                records.append(_record("brackets", golden.label, golden.side, binding, "skip",
                                       notes=[e.message]))
                continue
            failing = [k for k, v in errors.items() if not v <= tol]
            flagged = [k for k in failing if k != "sigma" and golden.flagged(tuple(k.split(",")))]
            notes = [f"printed {{{k}}} is marked inconsistent" for k in flagged]
            notes += [f"{k} differs by {errors[k]:.3e}" for k in failing if k not in flagged]
            if flagged:
                logger.warning("%s (%s): flagged pairs %s differ from the computed brackets",
                               golden.label, golden.side, flagged)
            status = "fail" if len(failing) > len(flagged) else ("flagged" if flagged else "pass")
            records.append(_record("brackets", golden.label, golden.side, binding, status,
                                   errors, {"sigma": render(golden.sigma)}, notes))
    logger.info("bracket_records rows=%d failed=%d", len(records), sum(r.failed for r in records))
    return records


def axiom_records(label: str, params: Optional[Mapping[str, Fraction]] = None,
                  samples: Optional[int] = None, seed: Optional[int] = None) -> List[TaskRecord]:
    """[Λ,Λ] = 2E∧Λ, [E,Λ] = 0 and their consequences, plus the conformal-factor mutation."""
    settings = get_settings()
    entry = bialgebra_repo.get_entry(label)
    binding = row_bindings(entry, params, 1, seed, sample_rparams=True)[0]
    instance = bialgebra_service.instantiate(entry, binding)
    records = []
    for side in entry.sides:
        try:
            js = jacobi_service.row_structure(instance, side)
        except UnsupportedChartError as e:
            records.append(_record("axioms", label, side, binding, "skip", notes=[e.message]))
            continue
        report = jacobi_service.verify_structure_axioms(js, samples, seed)
        residuals = {
            "lambda_lambda": report.lambda_lambda,
            "e_lambda": report.e_lambda,
            "bracket_jacobi": jacobi_service.check_bracket_jacobi_identity(js, samples=samples, seed=seed),
            "sharp_sigma": jacobi_service.check_sharp_sigma(js, samples, seed),
            "intrinsic_derivative": jacobi_service.check_intrinsic_derivative(js, instance.bialgebra),
        }
        notes = [f"{k} = {residuals[k]:.3e}" for k in ("lambda_lambda", "e_lambda", "bracket_jacobi", "sharp_sigma")
                 if not residuals[k] <= settings.axiom_tol]
        if not residuals["intrinsic_derivative"] <= FD_TOL:
            notes.append(f"intrinsic derivative off by {residuals['intrinsic_derivative']:.3e}")
        objects = {"sigma": render(js.sigma.expr), "E": ", ".join(render(e) for e in js.E)}
        # Informational: on many rows the factor cancels and the mutated structure is still valid.
        if not is_literal_zero(js.sigma.expr):
            mutated = jacobi_service.row_structure(instance, side, conformal=False)
            residuals["mutation"] = jacobi_service.verify_structure_axioms(
                mutated, samples, seed, relative=False).worst
            objects["conformal_factor"] = "essential" if residuals["mutation"] > MUTATION_THRESHOLD else "inert"
        records.append(_record("axioms", label, side, binding, _status(not notes), residuals, objects, notes))
    return records


def golden_labels() -> List[str]:
    seen: List[str] = []
    for golden in jacobi_service.load_golden():
        if golden.label not in seen:
            seen.append(golden.label)
    return seen


# ── Integrable system ────────────────────────────────────────────────

def resolve_system(ref: str):
    """A system name from the shipped catalog, or a systems file holding one record."""
    path = Path(ref)
    if path.suffix == ".dat" and path.is_file():
        specs = system_repo.load_systems(path)
        if len(specs) != 1:
            raise StructuralError(ref, f"expected one system record, found {len(specs)}")
        return integrable_service.build_system(specs[0])
    return integrable_service.load_system(ref)


def integrable_records(ref: str, k_max: int = 4, samples: Optional[int] = None,
                       seed: Optional[int] = None) -> List[TaskRecord]:
    settings = get_settings()
    seed = settings.seed if seed is None else seed
    sys = resolve_system(ref)
    relations = integrable_service.check_S_relations(sys, samples, seed)
    invariants = integrable_service.constants_of_motion(sys, k_max)
    formula = integrable_service.check_invariant_formula(sys, invariants)
    params = {}
    if sys.rparams:
        values = bialgebra_service.sample_values(sys.rparams, 1, seed, label=sys.name)[0]
        params = {k: float(v) for k, v in values.items()}
    involution = integrable_service.check_involution(sys.phase, invariants, samples, seed, params)
    gcybe = integrable_service.gcybe_violation(sys, samples, seed)
    independent = integrable_service.check_alpha_independence(invariants, sys.rparams)
    power = sys.spec.hamiltonian if sys.spec else 2
    H = invariants[power - 1] if power <= k_max else integrable_service.hamiltonian(sys, power)
    conserved = {name: integrable_service.conserved_check(sys, H, f)
                 for name, f in integrable_service.conserved_functions(sys).items()}

    notes = relations.footnote.messages()
    if not relations.exact:
        notes.append("S relations fail as polynomial identities")
    notes += [f"I_{k} differs from the closed form" for k, ok in formula.items() if not ok]
    if not independent:
        notes.append("constants of motion depend on the free r-parameters")
    if not involution <= settings.tol * 10:
        notes.append(f"constants not in involution ({involution:.3e})")
    if not gcybe <= settings.tol:
        notes.append(f"generalized Yang-Baxter residual {gcybe:.3e}")
    notes += [f"{name} is not conserved" for name, ok in conserved.items() if not ok]

    objects = {f"I{k}": render(e) for k, e in enumerate(invariants, start=1)}
    objects["H"] = render(H)
    return [_record("integrable", sys.name, "primal", status=_status(not notes),
                    residuals={"S_relations": relations.max_residual, "involution": involution,
                               "gcybe": gcybe},
                    objects=objects, notes=notes)]


# ── Description ──────────────────────────────────────────────────────

def describe_records(name: str, params: Optional[Mapping[str, Fraction]] = None,
                     seed: Optional[int] = None) -> List[TaskRecord]:
    """Structure constants, adjoint matrices, Killing form and unimodularity of an algebra."""
    settings = get_settings()
    algebra = algebra_repo.get_algebra(name)
    binding = {k: v for k, v in (params or {}).items() if k in algebra.params}
    if set(algebra.params) - set(binding):
        binding = bialgebra_service.sample_values(
            algebra.params, 1, settings.seed if seed is None else seed, algebra.constraints, label=name,
        )[0]
    g = bialgebra_service.instantiate_algebra(algebra, binding)
    validation = lie_service.validate_structure_constants(g.f)
    rep = lie_service.adjoint_matrices(g)
    objects = {
        "constants": ", ".join(f"f_{i + 1}{j + 1}^{k + 1}={render_rational(v)}"
                               for (i, j, k), v in sorted(g.nonzero().items())) or "abelian",
        "killing_form": render_matrix(lie_service.killing_form(g)),
        "unimodular": str(lie_service.is_unimodular(g)).lower(),
    }
    objects.update({f"X{i + 1}": render_matrix(m) for i, m in enumerate(rep.X)})
    return [_record("describe", name, binding=binding, status=_status(validation.is_valid),
                    objects=objects, notes=validation.messages())]


# ── Everything ───────────────────────────────────────────────────────

def full_report(samples: Optional[int] = None, seed: Optional[int] = None,
                tol: Optional[float] = None, k_max: int = 4) -> List[TaskRecord]:
    records = verify_catalog(seed=seed)
    for entry in bialgebra_service.load_catalog():
        records += solve_records(entry.label, count=1, seed=seed)
    records += chart_records(samples, seed, tol)
    records += bracket_records(samples=samples, seed=seed, tol=tol)
    for label in golden_labels():
        records += axiom_records(label, samples=samples, seed=seed)
    for spec in system_repo.load_systems():
        records += integrable_records(spec.name, k_max, samples, seed)
    return records
