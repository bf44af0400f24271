"""Error Boundary — exception handling and timing for CLI commands."""

import logging
import sys
import time
import traceback
from functools import wraps

from utils.validators import JLBError, UnknownLabelError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def log_command():
    """Logging-only decorator for commands. Logs name, duration, errors.

    Unlike safe_command(), this re-raises exceptions so callers (and tests)
    see them unchanged.
    """
    def decorator(fn):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.monotonic()
            try:
                result = fn(*args, **kwargs)
                duration_ms = (time.monotonic() - start) * 1000
                if duration_ms > 50:
                    logger.info("Command %s completed in %.0fms", fn.__name__, duration_ms)
                else:
                    logger.debug("Command %s completed in %.1fms", fn.__name__, duration_ms)
                return result
            except Exception as e:
                duration_ms = (time.monotonic() - start) * 1000
                logger.error(
                    "Command %s failed after %.0fms: %s\n%s",
                    fn.__name__, duration_ms, str(e), traceback.format_exc(),
                )
                raise
        return wrapper
    return decorator


def exit_code_for(exc: BaseException) -> int:
    """Unknown labels and bad input are usage errors; anything else is a failure."""
    if isinstance(exc, UnknownLabelError):
        return EXIT_USAGE
    if isinstance(exc, JLBError):
        return EXIT_USAGE
    return EXIT_FAILED


def safe_command(fallback_message="Command failed."):
    """Decorator for CLI entry points: catches exceptions and returns an exit code.

    Library errors print their message to stderr; unexpected errors print the
    fallback message and keep the traceback in the log.
    """
    def decorator(fn):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.monotonic()
            try:
                return fn(*args, **kwargs)
            except JLBError as e:
                duration_ms = (time.monotonic() - start) * 1000
                logger.error("Command %s rejected after %.0fms: %s", fn.__name__, duration_ms, e)
                print(f"error: {e}", file=sys.stderr)
                return exit_code_for(e)
            except Exception as e:
                duration_ms = (time.monotonic() - start) * 1000
                logger.error(
                    "Command %s failed after %.0fms: %s\n%s",
                    fn.__name__, duration_ms, str(e), traceback.format_exc(),
                )
                print(f"error: {fallback_message} {e}", file=sys.stderr)
                return EXIT_FAILED
        return wrapper
    return decorator
