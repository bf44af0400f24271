"""
Logging Configuration
=====================
Every CLI subcommand runs inside ``command_trace``, which tags its records
with the command name and an 8-char trace ID. Grepping one ID shows the
whole run from the catalog load down to each solver call.

Format:
    2026-03-01 14:23:05 [DEBUG] services.rmatrix_service:solve_r:128 [solve t:a1b2c3d4] free_dim=2 ...

Only the package loggers (``LIBRARY_LOGGERS``) follow ``--log-level``;
sympy and friends stay at WARNING.
"""

import logging
import sys
import uuid
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional, Tuple

LIBRARY_LOGGERS = ("app", "services", "repositories", "models", "utils", "config")
THIRD_PARTY_LOGGERS = ("sympy", "matplotlib", "hypothesis", "numexpr", "openpyxl")

FORMAT = ("%(asctime)s [%(levelname)-5s] %(name)s:%(funcName)s:%(lineno)d"
          "%(trace)s %(message)s")

_trace: ContextVar[Tuple[str, str]] = ContextVar("jlbialg_trace", default=("", ""))


def get_trace_id() -> str:
    return _trace.get()[1]


def get_command() -> str:
    return _trace.get()[0]


@contextmanager
def command_trace(command: str, trace_id: Optional[str] = None) -> Iterator[str]:
    """Run one subcommand under its own trace ID; the previous tag is restored on exit."""
    token = _trace.set((command, trace_id or uuid.uuid4().hex[:8]))
    logger = logging.getLogger("app")
    logger.debug("command %s started", command)
    try:
        yield _trace.get()[1]
    finally:
        logger.debug("command %s finished", command)
        _trace.reset(token)


class TraceFilter(logging.Filter):
    """Render the current command and trace ID as ``[cmd t:id]`` on every record."""

    def filter(self, record):
        command, tid = _trace.get()
        if tid:
            record.trace = f" [{command} t:{tid}]" if command else f" [t:{tid}]"
        else:
            record.trace = ""
        return True


def setup_logging(level: str = "INFO", stream=None) -> logging.Handler:
    """Attach one stderr handler to the root logger; reports own stdout.

    Repeated calls (one per ``main`` in tests) replace the handler instead of
    stacking a new one.
    """
    numeric = getattr(logging, str(level).upper(), logging.INFO)
    root = logging.getLogger()
    for old in [h for h in root.handlers if getattr(h, "_jlbialg", False)]:
        root.removeHandler(old)

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(FORMAT))
    handler.addFilter(TraceFilter())
    handler._jlbialg = True
    root.addHandler(handler)
    root.setLevel(min(numeric, logging.WARNING))

    for name in LIBRARY_LOGGERS:
        logging.getLogger(name).setLevel(numeric)
    for name in THIRD_PARTY_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
    return handler
