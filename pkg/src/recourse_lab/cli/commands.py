"""Implementation of CLI commands."""

import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from recourse_lab.config.defaults import load_config_data, merge_config
from recourse_lab.config.schema import ExperimentConfig, InstanceConfig
from recourse_lab.core.adversaries import AdaptiveAdversary
from recourse_lab.core.harness import (
    build_instance,
    column_fractions,
    parse_grid,
    run_experiment,
    sweep,
    verify,
    write_csv,
)
from recourse_lab.errors import (
    ConsistencyError,
    MalformedStreamError,
    MonitorViolation,
    OracleScaleError,
    ParameterError,
    RecourseLabError,
)
from recourse_lab.models.report import FAIL, PASS, BoundCheck, RunReport
from recourse_lab.utils import format_fraction

console = Console()

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2

# Errors caused by the user's input rather than by an algorithm.
INPUT_ERRORS = (
    ValidationError,
    MalformedStreamError,
    ParameterError,
    OracleScaleError,
    ValueError,
    FileNotFoundError,
)


def _fail(message: str, code: int) -> None:
    console.print(f"❌ {message}", style="red")
    sys.exit(code)


def _drop_none(values: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in values.items() if value is not None}


def build_config(
    config_path: Optional[str],
    algorithm: Dict[str, Any],
    instance: Dict[str, Any],
    monitor: Optional[str] = None,
    report_path: Optional[str] = None,
    label: Optional[str] = None,
) -> ExperimentConfig:
    """
    Combine a config file with command-line flags.

    Flags that were not given leave the file's values alone. Naming an
    instance file or a family on the command line replaces the file's
    instance section.
    """
    data = load_config_data(config_path)
    instance = _drop_none(instance)
    if "path" in instance or "family" in instance:
        data.pop("instance", None)

    overrides: Dict[str, Any] = {"algorithm": _drop_none(algorithm)}
    if instance:
        overrides["instance"] = instance
    if monitor is not None:
        enabled = monitor == "on"
        overrides["monitors"] = {
            "potential": enabled,
            "feasibility": enabled,
            "augmenting": enabled,
        }
    overrides.update(_drop_none({"report_path": report_path, "label": label}))
    return ExperimentConfig(**merge_config(data, overrides))


def gen_command(
    family: str,
    out: str,
    n: int = 10,
    p: float = 0.3,
    k: int = 3,
    rounds: int = 0,
    model: str = "vertex",
    seed: int = 0,
) -> None:
    """
    Generate an instance and write it as a JSONL event stream.

    Args:
        family: Generator family
        out: Output file
        n: Vertices (random) or path size (path)
        p: Edge probability (random)
        k: Edges in the triangle fan
        rounds: Repeated pairs of the vertex cover gadget
        model: Arrival model of random streams
        seed: Random seed
    """
    try:
        instance = InstanceConfig(
            family=family, n=n, p=p, k=k, rounds=rounds, model=model, seed=seed
        )
        source = build_instance(instance)
    except INPUT_ERRORS as e:
        _fail(f"Invalid instance: {e}", EXIT_CONFIG)

    if isinstance(source, AdaptiveAdversary):
        _fail(
            f"{family} is an adaptive adversary and cannot be generated ahead of a run",
            EXIT_CONFIG,
        )

    source.to_jsonl(out)
    console.print(
        f"\n✅ Wrote {len(source)} {source.model}-arrival events ({source.label}) to {out}",
        style="green",
    )


def print_summary(report: RunReport) -> None:
    """Print the headline numbers of a run."""
    table = Table(title=f"{report.algorithm} on {report.label}")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in report.summary().items():
        table.add_row(key, str(value))
    if "switches" in report.params:
        table.add_row("switches", str(report.params["switches"]))
    if "lower_bound" in report.params:
        table.add_row("lower_bound", str(report.params["lower_bound"]))
    console.print(table)

    for name, monitor in report.monitors.items():
        if monitor.get("violations"):
            console.print(
                f"[yellow]Warning:[/yellow] {name} monitor fired "
                f"{monitor['violations']} time(s)"
            )


def run_command(
    algorithm: Dict[str, Any],
    instance: Dict[str, Any],
    monitor: Optional[str] = None,
    config_path: Optional[str] = None,
    out: Optional[str] = None,
    label: Optional[str] = None,
) -> RunReport:
    """
    Run an algorithm on an instance and write the JSON report.

    Args:
        algorithm: Algorithm flags (algo, problem, t, L, yardstick, order)
        instance: Instance flags (path or family and its parameters)
        monitor: "on" or "off" for every runtime monitor
        config_path: Optional configuration file
        out: Report path
        label: Report label

    Returns:
        RunReport: The report that was written
    """
    try:
        config = build_config(config_path, algorithm, instance, monitor, out, label)
        if config.instance is None:
            _fail("No instance given: use --instance or --family", EXIT_CONFIG)
        console.print(
            f"\n🔄 Running {config.algorithm.algo} ({config.algorithm.problem})",
            style="blue",
        )
        report = run_experiment(config)
    except MonitorViolation as e:
        _fail(f"Monitor violation: {e}", EXIT_VIOLATION)
    except ConsistencyError as e:
        _fail(f"Internal consistency error: {e}", EXIT_VIOLATION)
    except INPUT_ERRORS as e:
        _fail(f"Invalid configuration: {e}", EXIT_CONFIG)

    print_summary(report)
    if config.report_path:
        console.print(f"\n💾 Report written to {config.report_path}", style="blue")
    return report


def print_checks(checks: List[BoundCheck]) -> None:
    table = Table(title="Bound checks")
    table.add_column("Check", style="cyan")
    table.add_column("Bound")
    table.add_column("Value", justify="right")
    table.add_column("Limit", justify="right")
    table.add_column("Slack", justify="right")
    table.add_column("Status")
    table.add_column("Note", style="dim")
    colors = {PASS: "green", FAIL: "red"}
    for check in checks:
        color = colors.get(check.status, "yellow")
        table.add_row(
            check.name,
            check.expression,
            str(format_fraction(check.measured)),
            str(format_fraction(check.bound)),
            str(format_fraction(check.slack)),
            f"[{color}]{check.status}[/{color}]",
            check.note,
        )
    console.print(table)


def verify_command(report_path: str) -> None:
    """
    Check a report against the bounds of its algorithm.

    Exits 0 when every check passes or is skipped, 1 when a bound is
    violated and 2 when the report cannot be read.
    """
    try:
        report = RunReport.read(report_path)
        status, checks = verify(report)
    except (KeyError, RecourseLabError, *INPUT_ERRORS) as e:
        _fail(f"Cannot verify {report_path}: {e}", EXIT_CONFIG)

    print_checks(checks)
    if status == EXIT_OK:
        console.print("\n✅ All bounds hold", style="green")
    else:
        failed = ", ".join(c.name for c in checks if c.status == FAIL)
        console.print(f"\n❌ Bound violated: {failed}", style="red")
    sys.exit(status)


def sweep_command(
    grid_items: Sequence[str],
    out: str,
    algorithm: Dict[str, Any],
    instance: Dict[str, Any],
    monitor: Optional[str] = None,
    config_path: Optional[str] = None,
    workers: int = 1,
) -> None:
    """
    Run a parameter grid and write one CSV row per grid point.

    Args:
        grid_items: ``KEY=v1,v2`` items
        out: CSV path
        algorithm: Algorithm flags shared by every row
        instance: Instance flags shared by every row
        monitor: "on" or "off" for every runtime monitor
        config_path: Optional configuration file
        workers: Worker processes
    """
    try:
        config = build_config(config_path, algorithm, instance, monitor)
        grid = parse_grid(grid_items)
    except INPUT_ERRORS as e:
        _fail(f"Invalid sweep: {e}", EXIT_CONFIG)

    rows = sweep(config, grid, workers=workers)
    write_csv(rows, out)

    failed = sum(1 for row in rows if row.get("status") == "fail")
    errors = sum(1 for row in rows if row.get("status") == "error")
    console.print(f"\n📊 Wrote {len(rows)} rows to {Path(out)}", style="green")
    measured = [v for v in column_fractions(rows, "amortized_type1") if v is not None]
    if measured:
        console.print(f"Largest amortized recourse: {format_fraction(max(measured))}")
    if errors:
        console.print(f"[yellow]Warning:[/yellow] {errors} row(s) could not be run")
    if failed:
        console.print(f"❌ {failed} row(s) violate a bound", style="red")
        sys.exit(EXIT_VIOLATION)
