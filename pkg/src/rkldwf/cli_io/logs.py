"""Logging setup for the command-line tool."""

import json
import logging
import sys
from typing import IO, Any, Dict, Optional

ROOT_LOGGER = "rkldwf"
LOG_FORMATS = ("json", "text")

# attributes every LogRecord carries; anything else came in through ``extra``
_STANDARD_ATTRS = set(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class JsonFormatter(logging.Formatter):
    """One JSON object per line."""

    def __init__(self, include_timestamps: bool = True):
        super().__init__()
        self.include_timestamps = include_timestamps

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if self.include_timestamps:
            payload["timestamp"] = self.formatTime(record, "%Y-%m-%dT%H:%M:%S")
        extra = {k: v for k, v in vars(record).items() if k not in _STANDARD_ATTRS}
        if extra:
            payload["extra"] = extra
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str, sort_keys=True)


def configure_logging(level: str = "WARNING", fmt: str = "json", include_timestamps: bool = True,
                      stream: Optional[IO[str]] = None) -> logging.Logger:
    """
    Attach a single stream handler to the package logger.

    Args:
        level: logging level name
        fmt: "json" or "text"
        include_timestamps: prefix records with their time
        stream: destination, stderr by default

    Returns:
        the configured package logger
    """
    if fmt not in LOG_FORMATS:
        raise ValueError(f"Unknown log format '{fmt}', expected one of {LOG_FORMATS}")
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(stream or sys.stderr)
    if fmt == "json":
        handler.setFormatter(JsonFormatter(include_timestamps))
    else:
        pattern = "%(levelname)s %(name)s: %(message)s"
        if include_timestamps:
            pattern = "%(asctime)s " + pattern
        handler.setFormatter(logging.Formatter(pattern))
    logger.addHandler(handler)
    logger.setLevel(level.upper())
    logger.propagate = False
    return logger
