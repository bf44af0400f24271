"""
Repository Base — Shared record-file infrastructure
===================================================
All catalog repositories read ``data/*.dat`` through here. A record file
is a sequence of records, each opened by a header line starting with an
allowlisted keyword and followed by body lines; blank lines and ``#``
comments are skipped. Loads are cached per resolved path.
"""

import inspect
import logging
import time
from functools import lru_cache
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple

from utils.validators import CatalogError, ParseError

logger = logging.getLogger(__name__)

# Allowlist of record kinds per catalog file.
ALLOWED_KINDS = {
    "algebra", "bialgebra", "chart", "brackets", "system", "automorphism",
}


class BodyLine(NamedTuple):
    line: int
    text: str


class Record(NamedTuple):
    kind: str
    header: str
    body: Tuple[BodyLine, ...]
    line: int
    path: str

    def where(self, line: Optional[int] = None) -> str:
        return f"{Path(self.path).name}:{line or self.line}"


def _caller_name() -> str:
    """Return the name of the calling function (two frames up)."""
    frame = inspect.currentframe()
    try:
        caller = frame.f_back.f_back
        return caller.f_code.co_name if caller else "unknown"
    finally:
        del frame


def _validate_kind(kind: str) -> None:
    if kind not in ALLOWED_KINDS:
        raise ValueError(f"Invalid record kind: {kind!r}")


def read_records(path, kind: str) -> List[Record]:
    """Split a record file into records of one kind. Missing file raises CatalogError."""
    _validate_kind(kind)
    caller = _caller_name()
    start = time.monotonic()
    records = list(_read_cached(str(Path(path).resolve()), kind))
    logger.debug(
        "load [caller=%s, file=%s] records=%d duration=%.1fms",
        caller, Path(path).name, len(records), (time.monotonic() - start) * 1000,
    )
    return records


@lru_cache(maxsize=None)
def _read_cached(path: str, kind: str) -> Tuple[Record, ...]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CatalogError(path, "catalog file not found")
    records = []
    header = None
    body: List[BodyLine] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        word, _, rest = stripped.partition(" ")
        if word == kind and not raw[:1].isspace():
            if header is not None:
                records.append(Record(kind, header[0], tuple(body), header[1], path))
            header = (rest.strip(), number)
            body = []
            continue
        if header is None:
            raise ParseError(f"{Path(path).name}:{number}", f"expected a '{kind}' record, got {stripped!r}")
        body.append(BodyLine(number, stripped))
    if header is not None:
        records.append(Record(kind, header[0], tuple(body), header[1], path))
    return tuple(records)


def split_assignment(record: Record, body: BodyLine) -> Tuple[str, str]:
    """``key = value`` → (key, value); the key may contain spaces (``pair x y``)."""
    key, sep, value = body.text.partition("=")
    if not sep:
        raise ParseError(record.where(body.line), f"expected 'key = value', got {body.text!r}")
    return key.strip(), value.strip()


def split_options(header: str) -> Tuple[str, dict]:
    """``A2 coords=x,y`` → ('A2', {'coords': 'x,y'})."""
    parts = header.split()
    if not parts:
        return "", {}
    options = {}
    for item in parts[1:]:
        key, sep, value = item.partition("=")
        options[key] = value if sep else ""
    return parts[0], options


def split_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


_LOADERS = []


def cached_loader(fn):
    """Cache a ``loader(path: str)`` until ``clear_cache()``."""
    cached = lru_cache(maxsize=None)(fn)
    _LOADERS.append(cached)
    return cached


def clear_cache() -> None:
    _read_cached.cache_clear()
    for loader in _LOADERS:
        loader.cache_clear()
