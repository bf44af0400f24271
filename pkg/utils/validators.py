"""Input Validation — domain exceptions and shared validation helpers.

Called by services and repositories before any algebra is built.
Never import sympy here. All functions accept/return pure Python types.
"""

from fractions import Fraction
from typing import List, Optional


# ── Exceptions & Result Container ────────────────────────────────────

class JLBError(Exception):
    """Base error. ``field`` names the offending input (label, index, file:line)."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class StructuralError(JLBError):
    """Shape or side mismatch: dimensions, mixed spaces, scalar contraction."""


class SingularityError(JLBError):
    """A matrix that must be invertible is not."""


class ParseError(JLBError):
    """Syntax error in an expression or a data file."""


class UndeclaredNameError(ParseError):
    """Expression mentions a name outside its context."""


class CatalogError(JLBError):
    """Unknown algebra, undeclared parameter, malformed rational, empty admissible set."""


class UnknownLabelError(CatalogError):
    """Lookup by catalog label failed."""


class UnsupportedChartError(JLBError):
    """σ integrand outside the closed-form class, or no chart for a row."""


class ValidationResult:
    """Collects multiple violations for batch reporting."""

    def __init__(self):
        self.errors: List[JLBError] = []

    def add_error(self, field: str, message: str):
        self.errors.append(JLBError(field, message))

    @property
    def is_valid(self) -> bool:
        return len(self.errors) == 0

    def messages(self) -> List[str]:
        return [str(e) for e in self.errors]

    def raise_if_invalid(self, error_cls=StructuralError):
        """Raise the first error with all messages joined."""
        if not self.is_valid:
            raise error_cls(
                self.errors[0].field,
                "; ".join(f"{e.field}: {e.message}" for e in self.errors),
            )

    def __len__(self):
        return len(self.errors)

    def __iter__(self):
        return iter(self.errors)


# ── Domain Enums ─────────────────────────────────────────────────────

SIDES = {"primal", "dual"}

# ce_differential modes
DIFFERENTIAL_MODES = {"d_star", "d", "d_star_X0", "d_phi0"}

# Classification.kind
CLASSIFICATION_KINDS = {"triangular", "quasitriangular", "not-coboundary-consistent"}

# bialgebras.dat group
CATALOG_GROUPS = {"bi-r-matrix", "coboundary"}

REPORT_FORMATS = {"json", "markdown", "xlsx"}

RECORD_STATUSES = {"pass", "fail", "skip", "flagged"}


# ── Validators ───────────────────────────────────────────────────────

def validate_side(side: str, field: str = "side") -> str:
    side = (side or "").strip().lower()
    if side not in SIDES:
        raise StructuralError(field, f"must be one of {sorted(SIDES)}, got {side!r}")
    return side


def validate_mode(mode: str) -> str:
    if mode not in DIFFERENTIAL_MODES:
        raise StructuralError("mode", f"must be one of {sorted(DIFFERENTIAL_MODES)}, got {mode!r}")
    return mode


def validate_format(fmt: str, out: Optional[str] = None) -> str:
    fmt = (fmt or "json").strip().lower()
    if fmt not in REPORT_FORMATS:
        raise JLBError("format", f"must be one of {sorted(REPORT_FORMATS)}")
    if fmt == "xlsx" and not out:
        raise JLBError("format", "xlsx output requires --out")
    return fmt


def validate_rational(text, field: str = "value") -> Fraction:
    """Parse ``3``, ``-5/3`` or ``0.25`` into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise CatalogError(field, f"malformed rational {text!r}")
    return value


def validate_param_binding(text: Optional[str]) -> dict:
    """Parse ``b=3,a=1/2`` into {'b': Fraction(3), 'a': Fraction(1, 2)}."""
    if not text:
        return {}
    binding = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise CatalogError("params", f"expected sym=rational, got {item!r}")
        name, value = (part.strip() for part in item.split("=", 1))
        if not name.isidentifier():
            raise CatalogError("params", f"invalid parameter name {name!r}")
        binding[name] = validate_rational(value, field=f"params.{name}")
    return binding


def validate_square(matrix, dim: int, field: str = "matrix"):
    if len(matrix) != dim or any(len(row) != dim for row in matrix):
        raise StructuralError(field, f"expected a {dim}x{dim} matrix")
    return matrix
