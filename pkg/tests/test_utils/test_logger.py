"""Tests for logging setup."""

import logging

from recourse_lab.utils.logger import configure_logging, get_logger


def test_get_logger_is_namespaced():
    """Test that module loggers hang below the package logger."""
    assert get_logger("recourse_lab.core.tas").name == "recourse_lab.core.tas"
    assert get_logger("scratch").name == "recourse_lab.scratch"


def test_configure_logging_level(monkeypatch):
    """Test the level comes from the argument, then the environment."""
    root = configure_logging("debug")
    assert root.level == logging.DEBUG
    assert len(root.handlers) == 1

    monkeypatch.setenv("RECOURSE_LAB_LOG_LEVEL", "ERROR")
    assert configure_logging().level == logging.ERROR
    assert len(configure_logging().handlers) == 1

    monkeypatch.delenv("RECOURSE_LAB_LOG_LEVEL")
    configure_logging("WARNING")
