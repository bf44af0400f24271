"""Labels — centralized user-facing strings and object rendering."""

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Tuple

# Report section titles, one per task kind
TASK_TITLES = {
    "conditions": "Bialgebra defining equations",
    "coboundary": "Coboundary equation for printed r-matrices",
    "classify": "Classification of r-matrices",
    "solve": "Solution spaces of the coboundary equation",
    "equivalence": "Equivalence under automorphisms",
    "charts": "Invariant vector fields",
    "brackets": "Jacobi brackets on the groups",
    "axioms": "Jacobi structure axioms",
    "integrable": "Integrable system",
    "describe": "Lie algebra",
}

# Classification display names
KIND_LABELS = {
    "triangular": "Triangular",
    "quasitriangular": "Quasitriangular",
    "not-coboundary-consistent": "Not coboundary consistent",
}

# Record status display
STATUS_LABELS = {
    "pass": "PASS",
    "fail": "FAIL",
    "skip": "SKIP",
    "flagged": "FLAGGED",
}

SIDE_LABELS = {
    "primal": "g",
    "dual": "g*",
}

# Basis symbol per side
BASIS_PREFIX = {
    "primal": "X",
    "dual": "X~",
}


def render_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_basis(side: str, indices: Sequence[int]) -> str:
    """0-based indices → ``X1^X2`` (``X~1^X~2`` on the dual side)."""
    prefix = BASIS_PREFIX[side]
    return "^".join(f"{prefix}{i + 1}" for i in indices)


def _join_terms(terms: Iterable[Tuple[str, str]]) -> str:
    """(coefficient text, basis text) pairs → signed sum."""
    out = ""
    for coef, basis in terms:
        negative = coef.startswith("-")
        body = coef[1:] if negative else coef
        if body == "1" and basis:
            text = basis
        else:
            text = f"{body} {basis}".strip()
        if not out:
            out = f"-{text}" if negative else text
        else:
            out += f" - {text}" if negative else f" + {text}"
    return out or "0"


def render_multivector(side: str, degree: int, components: Mapping[Tuple[int, ...], Fraction]) -> str:
    """``8 X1^X2^X3``, ``-1/2 X~1^X~2 + X~1^X~3``; scalars render as numbers."""
    if degree == 0:
        return render_rational(components.get((), 0))
    terms = [(render_rational(v), render_basis(side, key)) for key, v in sorted(components.items())]
    return _join_terms(terms)


def render_monomials(side: str, monomials) -> str:
    """Parametric ((indices), Expression) pairs → ``2*(b+1) X1^X2^X3``."""
    from services.symexpr_service import render

    if monomials is None:
        return "-"
    terms = []
    for indices, coef in monomials:
        text = render(coef)
        if " " in text and not text.startswith("("):
            text = f"({text})"
        terms.append((text, render_basis(side, indices)))
    return _join_terms(terms)


def render_matrix(m) -> str:
    """Nested list of rational strings: ``[[0, 1/2], [-1/2, 0]]``."""
    rows = []
    for i in range(m.rows):
        rows.append("[" + ", ".join(render_rational(Fraction(int(m[i, j].p), int(m[i, j].q)))
                                    for j in range(m.cols)) + "]")
    return "[" + ", ".join(rows) + "]"


def render_vector(values: Sequence) -> str:
    return "(" + ", ".join(render_rational(v) for v in values) + ")"


def render_binding(binding: Mapping[str, Fraction]) -> str:
    return ",".join(f"{k}={render_rational(v)}" for k, v in sorted(binding.items())) or "-"
