"""Run reports and bound checks."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from recourse_lab.utils import Ratio, format_fraction, parse_fraction

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass
class StepRecord:
    """Per-event measurements."""

    step: int
    alg: Fraction
    ref: Optional[Fraction] = None
    ratio: Optional[Ratio] = None
    type1: int = 0
    type2: Fraction = Fraction(0)
    late_ops: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "alg": format_fraction(self.alg),
            "ref": format_fraction(self.ref),
            "ratio": format_fraction(self.ratio),
            "type1": self.type1,
            "type2": format_fraction(self.type2),
            "late_ops": self.late_ops,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StepRecord":
        return cls(
            step=data["step"],
            alg=parse_fraction(data["alg"]),
            ref=parse_fraction(data.get("ref")),
            ratio=parse_fraction(data.get("ratio")),
            type1=data.get("type1", 0),
            type2=parse_fraction(data.get("type2", "0")),
            late_ops=data.get("late_ops", 0),
            extra=data.get("extra", {}),
        )


@dataclass
class PhaseRecord:
    """One phase of a switching algorithm: elements revealed and recourse paid."""

    index: int
    elements: int
    type1: int
    type2: Fraction
    closed: bool

    @property
    def ratio(self) -> Optional[Fraction]:
        if self.elements == 0:
            return None
        return Fraction(self.type1, self.elements)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "elements": self.elements,
            "type1": self.type1,
            "type2": format_fraction(self.type2),
            "closed": self.closed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PhaseRecord":
        return cls(
            index=data["index"],
            elements=data["elements"],
            type1=data["type1"],
            type2=parse_fraction(data["type2"]),
            closed=data["closed"],
        )


@dataclass
class RunReport:
    """Everything a run measured, serialisable to a single JSON document."""

    label: str
    algorithm: str
    problem: str
    params: Dict[str, Any] = field(default_factory=dict)
    steps: List[StepRecord] = field(default_factory=list)
    phases: List[PhaseRecord] = field(default_factory=list)
    element_count: int = 0
    type1_total: int = 0
    type2_total: Fraction = Fraction(0)
    amortized_type1: Fraction = Fraction(0)
    amortized_type2: Fraction = Fraction(0)
    monitors: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @property
    def final_ratio(self) -> Optional[Ratio]:
        if not self.steps:
            return Fraction(1)
        return self.steps[-1].ratio

    @property
    def max_ratio(self) -> Optional[Ratio]:
        ratios = [s.ratio for s in self.steps if s.ratio is not None]
        if not ratios:
            return None if self.steps else Fraction(1)
        return max(ratios)

    @property
    def final_alg(self) -> Fraction:
        return self.steps[-1].alg if self.steps else Fraction(0)

    @property
    def final_ref(self) -> Optional[Fraction]:
        return self.steps[-1].ref if self.steps else Fraction(0)

    def summary(self) -> Dict[str, Any]:
        return {
            "element_count": self.element_count,
            "type1_total": self.type1_total,
            "type2_total": format_fraction(self.type2_total),
            "amortized_type1": format_fraction(self.amortized_type1),
            "amortized_type2": format_fraction(self.amortized_type2),
            "final_ratio": format_fraction(self.final_ratio),
            "max_ratio": format_fraction(self.max_ratio),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "algorithm": self.algorithm,
            "problem": self.problem,
            "params": self.params,
            "summary": self.summary(),
            "phases": [p.to_dict() for p in self.phases],
            "monitors": self.monitors,
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunReport":
        summary = data.get("summary", {})
        return cls(
            label=data.get("label", ""),
            algorithm=data["algorithm"],
            problem=data["problem"],
            params=data.get("params", {}),
            steps=[StepRecord.from_dict(s) for s in data.get("steps", [])],
            phases=[PhaseRecord.from_dict(p) for p in data.get("phases", [])],
            element_count=summary.get("element_count", 0),
            type1_total=summary.get("type1_total", 0),
            type2_total=parse_fraction(summary.get("type2_total", "0")),
            amortized_type1=parse_fraction(summary.get("amortized_type1", "0")),
            amortized_type2=parse_fraction(summary.get("amortized_type2", "0")),
            monitors=data.get("monitors", {}),
        )

    def write(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)

    @classmethod
    def read(cls, path: Union[str, Path]) -> "RunReport":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


@dataclass
class BoundCheck:
    """A named inequality ``measured <= bound`` evaluated on a report."""

    name: str
    expression: str
    bound: Optional[Ratio] = None
    measured: Optional[Ratio] = None
    status: str = SKIPPED
    note: str = ""

    @property
    def slack(self) -> Optional[Ratio]:
        if self.bound is None or self.measured is None:
            return None
        return self.bound - self.measured

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "expression": self.expression,
            "bound": format_fraction(self.bound),
            "measured": format_fraction(self.measured),
            "status": self.status,
            "note": self.note,
        }
