"""
Structured logging for the RadGrad benchmark.

One configuration shared by the CLI, the suite runner and the experiment loop:
a concise console formatter by default, or JSON lines when ``json_logs`` is
set. Structured context goes through ``extra=`` and is promoted to top-level
JSON keys; numpy scalars and arrays are converted so they serialize.

Usage:
    from src.utils.logging import configure_logging, get_logger

    configure_logging(level="INFO", json_logs=False)
    log = get_logger(__name__)
    log.info("[ITERATION] done", extra={"iteration": 3, "queries": 412})
"""

from __future__ import annotations

import contextlib
import json
import logging
import logging.config
from collections.abc import Iterator
from pathlib import Path
from typing import Any

import numpy as np

_STANDARD_LOG_RECORD_FIELDS = frozenset(logging.makeLogRecord({}).__dict__.keys())


def _record_extra_fields(record: logging.LogRecord) -> dict[str, Any]:
    """Extract non-standard LogRecord fields injected via logging `extra=`."""
    return {
        key: value
        for key, value in record.__dict__.items()
        if key not in _STANDARD_LOG_RECORD_FIELDS and key not in {"message", "asctime"}
    }


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def _json_formatter(record: logging.LogRecord) -> str:
    """
    Render a log record as a JSON string.

    Output always includes `level`, `logger`, and `message`.
    Any non-standard fields added through `logging`'s `extra=` argument are
    promoted to top-level JSON keys.
    """
    payload: dict[str, Any] = {
        "level": record.levelname,
        "logger": record.name,
        "message": record.getMessage(),
    }
    if record.exc_info:
        payload["exc_info"] = logging.Formatter().formatException(record.exc_info)
    payload.update(_record_extra_fields(record))
    return json.dumps(payload, default=_to_jsonable)


class JsonFormatter(logging.Formatter):
    """JSON formatter for structured logs."""

    def format(self, record: logging.LogRecord) -> str:
        return _json_formatter(record)


# Context keys worth seeing on a console line; everything else stays JSON-only.
_CONSOLE_CONTEXT = ("run", "iteration", "cumulative_queries", "loss")


class ConsoleFormatter(logging.Formatter):
    """Human-readable lines with the run context appended as ``key=value`` pairs."""

    def __init__(self) -> None:
        super().__init__("%(asctime)s | %(levelname)s | %(name)s | %(message)s", "%Y-%m-%d %H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        extras = _record_extra_fields(record)
        context = " ".join(f"{key}={_to_jsonable(extras[key])}" for key in _CONSOLE_CONTEXT if key in extras)
        return f"{line} | {context}" if context else line


def configure_logging(level: str = "INFO", json_logs: bool = False) -> None:
    """
    Configure root logging for the CLI or a suite worker process.

    Replaces any existing root configuration. ``json_logs`` switches the
    console stream from ``ConsoleFormatter`` to one JSON object per line.
    """
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "console": {"()": ConsoleFormatter},
                "json": {"()": JsonFormatter},
            },
            "handlers": {
                "default": {
                    "class": "logging.StreamHandler",
                    "formatter": "json" if json_logs else "console",
                    "level": level,
                }
            },
            "root": {"handlers": ["default"], "level": level},
        }
    )


@contextlib.contextmanager
def run_log(path: Path, level: str = "INFO") -> Iterator[Path]:
    """
    Mirror every record emitted inside the block to a JSON-lines file at ``path``.

    The root level is lowered to ``level`` for the duration of the block when it
    is stricter, so the file is complete even if logging was never configured.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    handler.setFormatter(JsonFormatter())
    handler.setLevel(level)
    root = logging.getLogger()
    previous_level = root.level
    if root.getEffectiveLevel() > handler.level:
        root.setLevel(handler.level)
    root.addHandler(handler)
    try:
        yield path
    finally:
        root.removeHandler(handler)
        root.setLevel(previous_level)
        handler.close()


def get_logger(name: str | None = None) -> logging.Logger:
    """
    Get a logger with the given name. If name is None, returns the root logger.
    """
    return logging.getLogger(name)


__all__ = ["ConsoleFormatter", "JsonFormatter", "configure_logging", "get_logger", "run_log"]
