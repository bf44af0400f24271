"""Bracket Repository — printed σ and Jacobi brackets from brackets.dat."""

import logging
from typing import List, Optional

from config import get_settings
from models.expression import ParseContext
from models.geometry import GoldenBrackets
from repositories import bialgebra_repo
from repositories.base import cached_loader, read_records, split_assignment, split_options
from services.symexpr_service import parse, substitute
from utils.validators import CatalogError, ParseError, UnknownLabelError, validate_side

logger = logging.getLogger(__name__)

COORDS = ("x", "y", "z")


def load_brackets(path=None) -> List[GoldenBrackets]:
    return _load_brackets(str(path or get_settings().bracket_path))


@cached_loader
def _load_brackets(path: str) -> List[GoldenBrackets]:
    rows = []
    for record in read_records(path, "brackets"):
        label, _, side_text = record.header.rpartition(" side=")
        if not label:
            raise ParseError(record.where(), "brackets record needs '<label> side=primal|dual'")
        side = validate_side(side_text, field=record.where())
        entry = bialgebra_repo.get_entry(label)
        coords = COORDS[:entry.dim]
        context = ParseContext(coords=coords, params=entry.params + entry.rparams)
        lets = {}
        sigma = None
        pairs = {}
        inconsistent = []
        for body in record.body:
            key, value = split_assignment(record, body)
            where = record.where(body.line)
            words = key.split()
            if words[0] == "let" and len(words) == 2:
                expr = substitute(parse(value, context.with_params(*lets), field=where), lets)
                lets[words[1]] = expr
            elif key == "sigma":
                sigma = substitute(parse(value, context.with_params(*lets), field=where), lets)
            elif words[0] == "pair" and len(words) == 3:
                a, b = words[1], words[2]
                if a not in coords or b not in coords or coords.index(a) >= coords.index(b):
                    raise ParseError(where, f"pair must name coordinates in chart order, got {a} {b}")
                pairs[(a, b)] = substitute(parse(value, context.with_params(*lets), field=where), lets)
            elif key == "inconsistent":
                flagged = value.split()
                if len(flagged) != 2:
                    raise ParseError(where, "inconsistent takes one coordinate pair")
                inconsistent.append((flagged[0], flagged[1]))
            else:
                raise ParseError(where, f"unknown brackets line {body.text!r}")
        if sigma is None:
            raise ParseError(record.where(), f"{label} ({side}): missing sigma")
        missing = [(a, b) for i, a in enumerate(coords) for b in coords[i + 1:] if (a, b) not in pairs]
        if missing:
            raise CatalogError(record.where(), f"{label} ({side}): missing pairs {missing}")
        rows.append(GoldenBrackets(
            label=label,
            side=side,
            sigma=sigma,
            pairs=tuple(sorted(pairs.items())),
            params=entry.params,
            inconsistent=tuple(inconsistent),
            line=record.line,
        ))
    logger.debug("golden brackets [file=%s] rows=%d", path, len(rows))
    return rows


def get_brackets(label: str, side: Optional[str] = None, path=None) -> List[GoldenBrackets]:
    rows = [row for row in load_brackets(path)
            if row.label == label and (side is None or row.side == side)]
    if not rows:
        raise UnknownLabelError("label", f"no golden brackets for {label!r}" + (f" ({side})" if side else ""))
    return rows
