"""

Single-call logger factory used across every module.
Usage:
    from config.logger import get_logger
    log = get_logger(__name__)
"""

import logging
import sys
from typing import Optional

from config.settings import LOG_LEVEL, LOG_FORMAT

_level_override: Optional[str] = None


def get_logger(name: str) -> logging.Logger:
    logger = logging.getLogger(name)

    if not logger.handlers:                     # avoid duplicate handlers on re-import
        handler = logging.StreamHandler(sys.stdout)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.propagate = False

    level = _level_override or LOG_LEVEL
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    return logger


def set_level(level: str) -> None:
    """Re-level every logger created through get_logger (used by --log-level)."""
    global _level_override
    _level_override = level
    numeric = getattr(logging, level.upper(), logging.INFO)
    for name in list(logging.root.manager.loggerDict):
        logger = logging.getLogger(name)
        if logger.handlers:
            logger.setLevel(numeric)
