"""Automorphism Repository — change-of-basis matrices C for equivalence checks.

File format::

    automorphism <name>
      row = 1, 0, 0
      row = 0, -1, 0
      row = 0, 0, 1/2

Row i lists the components of the image of X_i.
"""

from fractions import Fraction
from typing import List, Tuple

from repositories.base import cached_loader, read_records, split_assignment, split_list
from utils.validators import CatalogError, ParseError, validate_rational

Rows = Tuple[Tuple[Fraction, ...], ...]


@cached_loader
def _load_matrices(path: str) -> List[Tuple[str, Rows]]:
    out = []
    for record in read_records(path, "automorphism"):
        rows = []
        for body in record.body:
            key, value = split_assignment(record, body)
            if key != "row":
                raise ParseError(record.where(body.line), f"unknown key {key!r}")
            rows.append(tuple(validate_rational(v, field=record.where(body.line))
                              for v in split_list(value)))
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ParseError(record.where(), f"automorphism {record.header}: expected a square matrix")
        out.append((record.header, tuple(rows)))
    return out


def load_matrix(path, name: str = None) -> Rows:
    """The named matrix of ``path``, or its only one when ``name`` is omitted."""
    matrices = _load_matrices(str(path))
    if name is None:
        if len(matrices) != 1:
            raise CatalogError(str(path), f"expected one automorphism, found {len(matrices)}")
        return matrices[0][1]
    for header, rows in matrices:
        if header == name:
            return rows
    raise CatalogError(str(path), f"no automorphism {name!r}")
