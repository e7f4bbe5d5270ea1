"""Logging setup backed by rich."""

import logging
import os

from dotenv import load_dotenv
from rich.logging import RichHandler

ROOT_LOGGER = "recourse_lab"
LEVEL_ENV_VAR = "RECOURSE_LAB_LOG_LEVEL"

_configured = False


def configure_logging(level: str = None) -> logging.Logger:
    """
    Attach a RichHandler to the package logger.

    Args:
        level: Level name; falls back to ``RECOURSE_LAB_LOG_LEVEL`` then WARNING

    Returns:
        logging.Logger: The package root logger
    """
    global _configured

    load_dotenv()
    root = logging.getLogger(ROOT_LOGGER)
    level_name = (level or os.getenv(LEVEL_ENV_VAR, "WARNING")).upper()
    root.setLevel(getattr(logging, level_name, logging.WARNING))

    if not _configured:
        handler = RichHandler(show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        root.addHandler(handler)
        root.propagate = False
        _configured = True

    return root


def get_logger(name: str) -> logging.Logger:
    """Return a child of the package logger, configuring it on first use."""
    if not _configured:
        configure_logging()
    if not name.startswith(ROOT_LOGGER):
        name = f"{ROOT_LOGGER}.{name}"
    return logging.getLogger(name)
