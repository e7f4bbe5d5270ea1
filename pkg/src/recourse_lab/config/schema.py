"""Configuration schema for Recourse Lab."""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from recourse_lab.utils import format_fraction, to_fraction

FAMILIES = ("bipartite-is", "path", "vc-gadget", "triangle-fan", "random")


class OracleConfig(BaseModel):
    """Configuration for the exact reference solvers."""

    cap: int = Field(
        40, gt=0, description="Largest vertex count for the branch-and-bound IS/VC oracle"
    )


class AlgorithmConfig(BaseModel):
    """Which online algorithm to run and with what parameters."""

    algo: Literal["tas", "lgreedy", "dh", "greedy"] = Field(
        "tas", description="Algorithm: target-and-switch, L-Greedy, Duo-Halve or plain greedy"
    )
    problem: Literal["is", "vc", "matching", "fractional-matching"] = Field(
        "is", description="Problem solved by the algorithm"
    )
    t: Optional[str] = Field(
        None, description="Target ratio, kept exact (e.g. '2.598' or '3/2')"
    )
    L: Optional[int] = Field(None, ge=0, description="L-Greedy path parameter")
    yardstick: Literal["exact", "greedy"] = Field(
        "exact", description="Reference solution used by target-and-switch"
    )
    order: Literal["me1-first", "recourse-first"] = Field(
        "me1-first", description="Duo-Halve tie-break order"
    )

    @field_validator("t", mode="before")
    @classmethod
    def t_must_exceed_one(cls, v):
        """Normalise t to an exact string and check t > 1."""
        if v is None:
            return v
        value = to_fraction(v)
        if value <= 1:
            raise ValueError(f"t must exceed 1, got {v}")
        if isinstance(v, str):
            return v.strip()
        if isinstance(v, float):
            return repr(v)
        return format_fraction(value)

    @model_validator(mode="after")
    def check_combination(self):
        """Reject parameter combinations the algorithms do not support."""
        if self.algo == "tas" and self.t is None:
            raise ValueError("target-and-switch requires t")
        if self.algo == "lgreedy":
            if self.problem != "matching":
                raise ValueError("L-Greedy solves matching")
            if self.L is None:
                if self.t is None:
                    raise ValueError("L-Greedy requires t or L")
                if to_fraction(self.t) >= 2:
                    raise ValueError("L-Greedy requires 1 < t < 2")
        if self.algo == "dh" and self.problem != "vc":
            raise ValueError("Duo-Halve solves vertex cover")
        if self.yardstick == "greedy" and self.problem not in ("matching", "vc"):
            raise ValueError("the greedy yardstick supports matching and vc only")
        return self


class InstanceConfig(BaseModel):
    """Where the arrival sequence comes from: a JSONL file or a generator."""

    path: Optional[str] = Field(None, description="JSONL event stream")
    family: Optional[
        Literal["bipartite-is", "path", "vc-gadget", "triangle-fan", "random"]
    ] = Field(
        None, description="Generator family"
    )
    n: int = Field(10, ge=0, description="Vertices (random) or path size (path)")
    p: float = Field(0.3, ge=0, le=1, description="Edge probability (random)")
    k: int = Field(3, ge=1, description="Number of edges in the triangle fan")
    rounds: int = Field(0, ge=0, description="Repeated pairs in the vertex cover gadget")
    switches: int = Field(8, ge=1, description="Switch budget of the bipartite adversary")
    budget: int = Field(100_000, ge=1, description="Event budget of adaptive adversaries")
    seed: int = Field(0, description="Random seed")
    model: Literal["vertex", "edge"] = Field(
        "vertex", description="Arrival model for random streams"
    )

    @field_validator("path")
    @classmethod
    def path_must_exist(cls, v):
        """Validate that the stream file exists."""
        if v is not None and not Path(v).expanduser().exists():
            raise ValueError(f"instance file not found: {v}")
        return v

    @model_validator(mode="after")
    def needs_source(self):
        if self.path is None and self.family is None:
            raise ValueError("either an instance path or a generator family is required")
        if self.path is not None and self.family is not None:
            raise ValueError("give an instance path or a generator family, not both")
        return self


class MonitorConfig(BaseModel):
    """Runtime invariant monitors."""

    potential: bool = Field(
        True, description="Duo-Halve potential, shift and full-me1 monitors"
    )
    feasibility: bool = Field(True, description="Check feasibility after every event")
    augmenting: bool = Field(
        True, description="Check that L-Greedy leaves no short augmenting path"
    )


class ExperimentConfig(BaseModel):
    """Main experiment configuration."""

    oracle: OracleConfig = Field(default_factory=OracleConfig)
    algorithm: AlgorithmConfig = Field(default_factory=lambda: AlgorithmConfig(t="2"))
    instance: Optional[InstanceConfig] = Field(None, description="Instance to run")
    monitors: MonitorConfig = Field(default_factory=MonitorConfig)
    report_path: Optional[str] = Field(None, description="Where to write the report")
    label: Optional[str] = Field(None, description="Report label; defaults to the instance's")

