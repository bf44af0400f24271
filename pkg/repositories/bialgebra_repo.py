"""Bialgebra Repository — coboundary Jacobi-Lie bialgebra rows from bialgebras.dat."""

import logging
from typing import List, Optional, Tuple

from config import get_settings
from models.bialgebra import Monomials, ParametricEntry
from models.expression import ParseContext
from repositories import algebra_repo
from repositories.base import cached_loader, Record, read_records, split_assignment, split_list
from services.symexpr_service import parse
from utils.validators import (
    CATALOG_GROUPS, CatalogError, ParseError, UndeclaredNameError, UnknownLabelError, validate_rational,
)

logger = logging.getLogger(__name__)

_KEYS = {
    "group", "primal", "dual", "params", "rparams", "excluded", "alpha", "beta",
    "r", "rdual", "residue", "residue_dual", "inconsistent",
}
_INCONSISTENT_ITEMS = {"r", "rdual", "residue", "residue_dual"}


def parse_monomials(text: str, degree: int, dim: int, context: ParseContext, field: str) -> Monomials:
    """``coef i j; coef i j`` → ((indices, expr), ...) with 0-based indices."""
    terms = []
    for item in (part.strip() for part in text.split(";")):
        if not item:
            continue
        tokens = item.split()
        if len(tokens) < degree + 1:
            raise ParseError(field, f"expected 'coef' plus {degree} indices, got {item!r}")
        try:
            indices = tuple(int(t) - 1 for t in tokens[-degree:])
        except ValueError:
            raise ParseError(field, f"non-integer index in {item!r}")
        if any(not 0 <= i < dim for i in indices) or len(set(indices)) != degree:
            raise ParseError(field, f"indices out of range or repeated in {item!r}")
        coef = parse(" ".join(tokens[:-degree]), context, field=field)
        terms.append((indices, coef))
    return tuple(terms)


def _entry_from_record(record: Record) -> ParametricEntry:
    label = record.header
    values = {}
    lines = {}
    for body in record.body:
        key, value = split_assignment(record, body)
        if key not in _KEYS:
            raise ParseError(record.where(body.line), f"unknown key {key!r}")
        values[key] = value
        lines[key] = body.line
    for required in ("group", "primal", "dual", "alpha", "beta"):
        if required not in values:
            raise ParseError(record.where(), f"{label}: missing '{required}'")
    group = values["group"]
    if group not in CATALOG_GROUPS:
        raise CatalogError(record.where(lines["group"]), f"unknown group {group!r}")

    params = tuple(split_list(values.get("params", "")))
    rparams = tuple(split_list(values.get("rparams", "")))
    primal = algebra_repo.get_algebra(values["primal"])
    dual_name, rename = algebra_repo.parse_algebra_ref(values["dual"])
    dual = algebra_repo.get_algebra(values["dual"])
    for algebra in (primal, dual):
        missing = set(algebra.params) - set(params)
        if missing:
            raise CatalogError(record.where(), f"{label}: algebra {algebra.name} needs undeclared {sorted(missing)}")
    dim = primal.dim
    if dual.dim != dim:
        raise CatalogError(record.where(), f"{label}: {primal.name} and {dual.name} differ in dimension")

    context = ParseContext(params=params)
    r_context = ParseContext(params=params + rparams)

    def expr_list(key):
        items = split_list(values[key])
        if len(items) != dim:
            raise CatalogError(record.where(lines[key]), f"{key} needs {dim} components, got {len(items)}")
        return tuple(parse(item, context, field=record.where(lines[key])) for item in items)

    def monomials(key, degree) -> Optional[Monomials]:
        if key not in values:
            return None
        return parse_monomials(values[key], degree, dim, r_context, record.where(lines[key]))

    excluded = []
    for item in split_list(values.get("excluded", "")):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in params:
            raise CatalogError(record.where(lines["excluded"]), f"excluded value {item!r} names no declared parameter")
        excluded.append((name, validate_rational(value, record.where(lines["excluded"]))))

    inconsistent = tuple(values.get("inconsistent", "").split())
    unknown = set(inconsistent) - _INCONSISTENT_ITEMS
    if unknown:
        raise CatalogError(record.where(lines["inconsistent"]), f"cannot flag {sorted(unknown)}")

    try:
        return ParametricEntry(
            label=label,
            group=group,
            primal=primal.name,
            dual=dual_name,
            dual_rename=tuple(sorted(rename.items())),
            params=params,
            rparams=rparams,
            excluded=tuple(excluded),
            alpha=expr_list("alpha"),
            beta=expr_list("beta"),
            r=monomials("r", 2),
            rdual=monomials("rdual", 2),
            residue=monomials("residue", 3),
            residue_dual=monomials("residue_dual", 3),
            inconsistent=inconsistent,
            line=record.line,
        )
    except UndeclaredNameError as exc:
        raise CatalogError(exc.field, exc.message)


def load_catalog(path=None) -> List[ParametricEntry]:
    return _load_catalog(str(path or get_settings().bialgebra_path))


@cached_loader
def _load_catalog(path: str) -> List[ParametricEntry]:
    entries = []
    seen = set()
    for record in read_records(path, "bialgebra"):
        entry = _entry_from_record(record)
        if entry.label in seen:
            raise CatalogError(record.where(), f"duplicate label {entry.label}")
        seen.add(entry.label)
        entries.append(entry)
    logger.debug("catalog [file=%s] entries=%d", path, len(entries))
    return entries


def get_entry(label: str, path=None) -> ParametricEntry:
    for entry in load_catalog(path):
        if entry.label == label:
            return entry
    raise UnknownLabelError("label", f"no catalog row {label!r}")


def labels(path=None) -> Tuple[str, ...]:
    return tuple(entry.label for entry in load_catalog(path))
