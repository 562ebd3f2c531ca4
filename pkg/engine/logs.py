"""
Logging setup for maskcert.

Installs one handler on the package logger (or the root logger) the first time
it is called; later calls return the same handler. Output goes to stderr so
that stdout stays free for command results. With json_output the records are
emitted as JSON lines through python-json-logger.
"""
import logging
import sys
from pathlib import Path
from typing import Optional

from pythonjsonlogger.json import JsonFormatter

# ── Constants ────────────────────────────────────────────────────────────────
DEFAULT_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
JSON_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"
DATE_FORMAT = "%H:%M:%S"

LEVELS = {
    "DEBUG":   logging.DEBUG,
    "INFO":    logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR":   logging.ERROR,
}

# ── Singleton ─────────────────────────────────────────────────────────────────
_handler: Optional[logging.Handler] = None


def install_logging(
    level: str = "INFO",
    fmt: str = DEFAULT_FORMAT,
    json_output: bool = False,
    file: Optional[str] = None,
    logger_name: str = "",
) -> logging.Handler:
    """
    Install the stderr (or file) handler on the given logger (default: root).

    Safe to call multiple times: the level is updated, the handler is reused.
    """
    global _handler
    target = logging.getLogger(logger_name)
    target.setLevel(LEVELS.get(str(level).upper(), logging.INFO))

    if _handler is not None:
        return _handler

    if file:
        Path(file).parent.mkdir(parents=True, exist_ok=True)
        handler: logging.Handler = logging.FileHandler(file, encoding="utf-8")
    else:
        handler = logging.StreamHandler(sys.stderr)

    if json_output:
        handler.setFormatter(JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(fmt, datefmt=DATE_FORMAT))

    target.addHandler(handler)
    _handler = handler
    logging.getLogger(__name__).debug("logging installed (json=%s)", json_output)
    return handler


def get_handler() -> Optional[logging.Handler]:
    """Return the installed handler, or None if not yet installed."""
    return _handler


def uninstall_logging(logger_name: str = "") -> None:
    """Remove the installed handler (used by tests)."""
    global _handler
    if _handler is not None:
        logging.getLogger(logger_name).removeHandler(_handler)
        _handler.close()
        _handler = None
