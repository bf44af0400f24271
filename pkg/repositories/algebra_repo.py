"""Algebra Repository — parametric Lie algebras from algebras.dat."""

import re
from collections import OrderedDict
from typing import Dict, Mapping, Tuple

from config import get_settings
from models.expression import ParseContext
from models.lie import Constraint, ParametricAlgebra
from repositories.base import cached_loader, read_records, split_list, split_options
from services.symexpr_service import parse
from utils.validators import CatalogError, ParseError, UnknownLabelError, validate_rational

_CONSTRAINT_RE = re.compile(r"^([A-Za-z_]\w*)\s*(>=|<=|!=|>|<)\s*(.+)$")
_REF_RE = re.compile(r"^([^\[\]]+)(?:\[([^\]]*)\])?$")


def parse_constraints(text: str, field: str) -> Tuple[Constraint, ...]:
    constraints = []
    for item in split_list(text):
        match = _CONSTRAINT_RE.match(item)
        if not match:
            raise ParseError(field, f"malformed constraint {item!r}")
        name, op, value = match.groups()
        constraints.append(Constraint(name, op, validate_rational(value, field)))
    return tuple(constraints)


def parse_algebra_ref(ref: str) -> Tuple[str, Dict[str, str]]:
    """``VI_a.v[a=b]`` → ('VI_a.v', {'a': 'b'})."""
    match = _REF_RE.match(ref.strip())
    if not match:
        raise CatalogError("algebra", f"malformed algebra reference {ref!r}")
    name, renames = match.groups()
    mapping = {}
    for item in split_list(renames or ""):
        old, sep, new = item.partition("=")
        if not sep or not old.strip().isidentifier() or not new.strip().isidentifier():
            raise CatalogError("algebra", f"malformed parameter rename {item!r} in {ref!r}")
        mapping[old.strip()] = new.strip()
    return name.strip(), mapping


def load_algebras(path=None) -> "OrderedDict[str, ParametricAlgebra]":
    return _load_algebras(str(path or get_settings().algebra_path))


@cached_loader
def _load_algebras(path: str) -> "OrderedDict[str, ParametricAlgebra]":
    algebras: "OrderedDict[str, ParametricAlgebra]" = OrderedDict()
    for record in read_records(path, "algebra"):
        name, options = split_options(record.header)
        if not name:
            raise ParseError(record.where(), "algebra record without a name")
        try:
            dim = int(options.get("dim", ""))
        except ValueError:
            raise ParseError(record.where(), f"algebra {name}: missing or invalid dim")
        params, constraints, constants = [], [], []
        for body in record.body:
            word, _, rest = body.text.partition(" ")
            if word == "param":
                pname, popts = split_options(rest)
                params.append(pname)
                if popts.get("constraint"):
                    constraints.extend(parse_constraints(popts["constraint"], record.where(body.line)))
            elif word == "f":
                constants.append(_parse_constant(record, body, rest, dim, tuple(params)))
            else:
                raise ParseError(record.where(body.line), f"unknown algebra line {body.text!r}")
        if name in algebras:
            raise CatalogError(record.where(), f"duplicate algebra {name}")
        algebras[name] = ParametricAlgebra(
            name=name, dim=dim, params=tuple(params), constraints=tuple(constraints),
            constants=tuple(constants), line=record.line,
        )
    return algebras


def _parse_constant(record, body, rest, dim, params):
    parts = rest.split(None, 3)
    if len(parts) != 4:
        raise ParseError(record.where(body.line), f"expected 'f i j k value', got {body.text!r}")
    try:
        i, j, k = (int(p) for p in parts[:3])
    except ValueError:
        raise ParseError(record.where(body.line), f"non-integer index in {body.text!r}")
    if not (1 <= i < j <= dim and 1 <= k <= dim):
        raise ParseError(record.where(body.line), f"indices must satisfy 1 <= i < j <= {dim}")
    value = parse(parts[3], ParseContext(params=params), field=record.where(body.line))
    return (i - 1, j - 1, k - 1), value


def get_algebra(ref: str, path=None) -> ParametricAlgebra:
    """Look up ``NAME`` or ``NAME[a=b]`` (parameters renamed)."""
    name, mapping = parse_algebra_ref(ref)
    algebras = load_algebras(path)
    if name not in algebras:
        raise UnknownLabelError("algebra", f"unknown algebra {name!r}")
    return algebras[name].renamed(mapping)


def algebra_names(path=None) -> Tuple[str, ...]:
    return tuple(load_algebras(path))


def rename_map(ref: str) -> Mapping[str, str]:
    return parse_algebra_ref(ref)[1]
