"""
Logging for mtverify

Everything logs to the single "mtverify" logger. The console shows the
configured level, the rotating log file keeps DEBUG and up, and each file
record is stamped with the curve and check it was emitted under, so lines
from concurrent suite workers can be told apart.
"""

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Iterator, Optional, Union

from ..errors import ConfigInvalid


LOGGER_NAME = "mtverify"
DEFAULT_LOG_FILE = Path("./.mtverify_cache/mtverify.log")

FILE_FORMAT = "%(asctime)s %(levelname)-8s [%(scope)s] %(message)s"
CONSOLE_FORMAT = "%(levelname)s: %(message)s"
LOG_MAX_BYTES = 5 * 1024 * 1024
LOG_BACKUPS = 3

_scope: ContextVar[str] = ContextVar("mtverify_log_scope", default="-")


class ScopeFilter(logging.Filter):
    """Attach the current '<curve> <check>' scope to every record"""

    def filter(self, record: logging.LogRecord) -> bool:
        record.scope = _scope.get()
        return True


@contextmanager
def log_scope(curve_label: str, check_id: str = "") -> Iterator[str]:
    """Records logged inside the block carry '<curve_label> <check_id>'"""
    token = _scope.set(f"{curve_label} {check_id}".strip())
    try:
        yield _scope.get()
    finally:
        _scope.reset(token)


def parse_level(level: Union[int, str]) -> int:
    """
    Numeric logging level from a number or a name such as 'debug'

    Raises:
        ConfigInvalid: For an unknown level name
    """
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).strip().upper())
    if not isinstance(value, int):
        raise ConfigInvalid(f"unknown log level {level!r}")
    return value


def setup_logger(
    log_file: Optional[Path] = None,
    level: Union[int, str] = logging.INFO,
    name: str = LOGGER_NAME,
) -> logging.Logger:
    """
    Configure the package logger

    Handlers left by an earlier call are closed and replaced, so each CLI
    command logs to the file its own configuration names.

    Args:
        log_file: Rotating log file; DEFAULT_LOG_FILE when None
        level: Console level, by name or number

    Returns:
        The configured logger
    """
    console_level = parse_level(level)
    logger = logging.getLogger(name)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(logging.DEBUG)

    console = logging.StreamHandler()
    console.setLevel(console_level)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    logger.addHandler(console)

    path = Path(log_file) if log_file is not None else DEFAULT_LOG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    file_handler = RotatingFileHandler(path, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUPS, encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt='%Y-%m-%d %H:%M:%S'))
    file_handler.addFilter(ScopeFilter())
    logger.addHandler(file_handler)

    logger.debug(f"logging to {path} (console level {logging.getLevelName(console_level)})")
    return logger
