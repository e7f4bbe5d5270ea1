"""Exception hierarchy shared by the library and the command-line interface."""

from typing import Any, Dict, Optional


class RecourseLabError(Exception):
    """Base class for all recourse-lab errors."""


class MalformedStreamError(RecourseLabError, ValueError):
    """An arrival event references unknown vertices or repeats an element."""


class UndefinedMetricError(RecourseLabError):
    """A metric was requested for an empty denominator (e.g. zero elements)."""


class OracleScaleError(RecourseLabError):
    """The exact oracle refused a graph above its configured vertex cap."""

    def __init__(self, vertices: int, cap: int):
        self.vertices = vertices
        self.cap = cap
        super().__init__(
            f"exact oracle capped at {cap} vertices, graph has {vertices}"
        )


class ParameterError(RecourseLabError, ValueError):
    """An algorithm or generator parameter is outside its admissible range."""


class ConsistencyError(RecourseLabError):
    """An algorithm produced a state that contradicts its own invariants."""


class MonitorViolation(RecourseLabError):
    """A runtime monitor fired; carries a dump of the offending state."""

    def __init__(self, message: str, dump: Optional[Dict[str, Any]] = None):
        self.dump = dump or {}
        super().__init__(message)
