"""
Logging utility for gkmquiver
"""

import logging
import os
from pathlib import Path
from datetime import datetime
from typing import Dict, Optional, Union

LOG_DIR = Path(os.environ.get("GKMQUIVER_LOG_DIR", Path(__file__).parent.parent / "logs"))
DEFAULT_CONSOLE_LEVEL = os.environ.get("GKMQUIVER_LOG_LEVEL", "WARNING").upper()

_console_handlers: Dict[str, logging.Handler] = {}


def _file_handler(formatter: logging.Formatter) -> Optional[logging.Handler]:
    try:
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        log_file = LOG_DIR / f"gkmquiver_{datetime.now().strftime('%Y%m%d')}.log"
        handler = logging.FileHandler(log_file, encoding='utf-8')
    except OSError:
        return None
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(formatter)
    return handler


def setup_logger(name: str, log_level: int = logging.DEBUG) -> logging.Logger:
    """
    Setup logger with file and console handlers

    Console output goes to stderr so that command payloads on stdout
    stay machine-readable.

    Args:
        name: Logger name
        log_level: Level of the logger itself (handlers filter further)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(log_level)
    logger.propagate = False

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    console_handler = logging.StreamHandler()
    console_handler.setLevel(DEFAULT_CONSOLE_LEVEL)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)
    _console_handlers[name] = console_handler

    file_handler = _file_handler(formatter)
    if file_handler is not None:
        logger.addHandler(file_handler)

    return logger


def set_log_level(level: Union[int, str]) -> None:
    """Change the console level of every logger created by setup_logger"""
    if isinstance(level, str):
        level = level.upper()
    for handler in _console_handlers.values():
        handler.setLevel(level)
