"""
Structured logging for engine runs.

Records are JSON objects on standard error (standard output belongs to RXL
programs). While ``LogContext`` is active, every record carries the id of the
engine run plus the context fields it was opened with, e.g. the strategy.
"""
import json
import logging
import sys
import uuid
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Optional

# Id and fields of the engine run currently executing
run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)
run_fields_var: ContextVar[Dict[str, Any]] = ContextVar("run_fields", default={})

_RECORD_FIELDS = ("module", "funcName", "lineno")


def _jsonable(value: Any) -> Any:
    try:
        json.dumps(value)
        return value
    except (TypeError, ValueError):
        return str(value)


class RunContextFilter(logging.Filter):
    """Stamps the active run id and run fields onto each record."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = run_id_var.get()
        record.run_fields = run_fields_var.get()
        return True


class StructuredFormatter(logging.Formatter):
    """
    One JSON object per record.

    Keys: timestamp, level, logger, message, module, function, line, the run
    id and run fields when an engine run is active, fields passed through
    ``StructuredLogger`` and an ``exception`` block for ``exc_info`` records.
    """

    def format(self, record: logging.LogRecord) -> str:
        module, function, line = (getattr(record, name) for name in _RECORD_FIELDS)
        entry: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": module,
            "function": function,
            "line": line,
        }
        run_id = getattr(record, "run_id", None)
        if run_id:
            entry["run_id"] = run_id
            entry.update({key: _jsonable(value) for key, value in getattr(record, "run_fields", {}).items()})
        fields = getattr(record, "fields", None)
        if fields:
            entry.update({key: _jsonable(value) for key, value in fields.items()})
        if record.exc_info and record.exc_info[0] is not None:
            entry["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
                "traceback": self.formatException(record.exc_info),
            }
        return json.dumps(entry, default=str)


class StructuredLogger:
    """Logger whose keyword arguments become JSON fields."""

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)

    def _log(self, level: int, message: str, exc_info: bool = False, **fields):
        if self.logger.isEnabledFor(level):
            self.logger.log(level, message, exc_info=exc_info, extra={"fields": fields}, stacklevel=3)

    def debug(self, message: str, **fields):
        self._log(logging.DEBUG, message, **fields)

    def info(self, message: str, **fields):
        self._log(logging.INFO, message, **fields)

    def warning(self, message: str, **fields):
        self._log(logging.WARNING, message, **fields)

    def error(self, message: str, **fields):
        self._log(logging.ERROR, message, **fields)

    def exception(self, message: str, **fields):
        self._log(logging.ERROR, message, exc_info=True, **fields)


def get_logger(name: str) -> StructuredLogger:
    return StructuredLogger(name)


def configure_structured_logging(level: str = "WARNING", enable_json: bool = True, log_file: Optional[str] = None):
    """
    Route all records to standard error and, optionally, a file.

    Args:
        level: Log level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        enable_json: JSON records when true, plain text otherwise
        log_file: Optional file receiving the same records
    """
    numeric_level = getattr(logging, level.upper(), logging.WARNING)
    if enable_json:
        formatter: logging.Formatter = StructuredFormatter()
    else:
        formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    root = logging.getLogger()
    root.setLevel(numeric_level)
    root.handlers.clear()
    for handler in handlers:
        handler.setLevel(numeric_level)
        handler.setFormatter(formatter)
        handler.addFilter(RunContextFilter())
        root.addHandler(handler)
    root.debug(f"Logging configured at {level} (json={enable_json}, file={log_file})")


def new_run_id() -> str:
    return uuid.uuid4().hex[:12]


def get_run_id() -> Optional[str]:
    """Id of the engine run in progress, None outside a run."""
    return run_id_var.get()


class LogContext:
    """
    Binds a run id and extra fields while a program unit executes.

    Usage:
        with LogContext(strategy="compilation"):
            logger.debug("Running program unit")

    Nested contexts keep the outer run id.
    """

    def __init__(self, run_id: Optional[str] = None, **fields):
        self.run_id = run_id
        self.fields = fields
        self._tokens = None

    def __enter__(self) -> "LogContext":
        self.run_id = self.run_id or run_id_var.get() or new_run_id()
        merged = {**run_fields_var.get(), **self.fields}
        self._tokens = (run_id_var.set(self.run_id), run_fields_var.set(merged))
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self._tokens is not None:
            id_token, fields_token = self._tokens
            run_fields_var.reset(fields_token)
            run_id_var.reset(id_token)
            self._tokens = None
