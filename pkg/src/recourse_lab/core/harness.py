"""Experiment orchestration: run an algorithm on an instance, check its bounds, sweep grids."""

import concurrent.futures
import csv
import itertools
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from recourse_lab.config.schema import AlgorithmConfig, ExperimentConfig, InstanceConfig
from recourse_lab.core.adversaries import (
    AdaptiveAdversary,
    BipartiteISAdversary,
    gen_bipartite_is_adversary,
    gen_matching_path,
    gen_random,
    gen_vc_repeating_gadget,
    gen_vc_triangle_fan,
    play,
)
from recourse_lab.core.base import OnlineAlgorithm, StepOutcome
from recourse_lab.core.matching import (
    LGreedy,
    check_no_short_path,
    component_recourse,
    path_lower_bound,
    recourse_bound,
)
from recourse_lab.core.oracles import make_yardstick, oracle_cache_info, solve
from recourse_lab.core.tas import (
    GreedyBaseline,
    TargetAndSwitch,
    independent_set_bound,
    type1_bound,
    type2_bound,
)
from recourse_lab.core.vertexcover import (
    AMORTIZED_BOUND,
    GADGET_LIMIT,
    DuoHalve,
    dh_ratio_bound,
    parse_order,
)
from recourse_lab.errors import (
    ConsistencyError,
    OracleScaleError,
    ParameterError,
    RecourseLabError,
)
from recourse_lab.models.assignment import get_problem
from recourse_lab.models.graph import EventStream
from recourse_lab.models.ledger import amortized_recourse, sum_max_holds
from recourse_lab.models.report import (
    FAIL,
    PASS,
    BoundCheck,
    RunReport,
    StepRecord,
)
from recourse_lab.utils import (
    Ratio,
    competitive_ratio,
    format_fraction,
    parse_fraction,
    to_fraction,
)
from recourse_lab.utils.logger import get_logger

logger = get_logger(__name__)

Source = Union[EventStream, AdaptiveAdversary]

DH_MONITORS = ("potential", "shift", "full-me1")


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------


def build_algorithm(config: ExperimentConfig) -> OnlineAlgorithm:
    """Instantiate the configured algorithm."""
    algo: AlgorithmConfig = config.algorithm
    problem = get_problem(algo.problem)
    if algo.algo == "tas":
        yardstick = make_yardstick(problem, algo.yardstick, config.oracle.cap)
        return TargetAndSwitch(problem, algo.t, yardstick)
    if algo.algo == "greedy":
        return GreedyBaseline(problem, algo.t)
    if algo.algo == "lgreedy":
        return LGreedy(L=algo.L, t=algo.t)
    if algo.algo == "dh":
        return DuoHalve(order=parse_order(algo.order), monitor=config.monitors.potential)
    raise ParameterError(f"unknown algorithm {algo.algo!r}")


def build_instance(instance: InstanceConfig, t: Optional[str] = None) -> Source:
    """
    Load or generate the arrival sequence.

    Args:
        instance: Instance configuration
        t: Target ratio the bipartite adversary is labelled with

    Returns:
        An EventStream, or an AdaptiveAdversary for the ``bipartite-is`` family
    """
    if instance.path is not None:
        return EventStream.from_jsonl(instance.path)
    family = instance.family
    if family == "path":
        return gen_matching_path(instance.n)
    if family == "vc-gadget":
        return gen_vc_repeating_gadget(instance.rounds)
    if family == "triangle-fan":
        return gen_vc_triangle_fan(instance.k)
    if family == "random":
        return gen_random(instance.model, instance.n, instance.p, instance.seed)
    if family == "bipartite-is":
        return gen_bipartite_is_adversary(
            t or "2", budget=instance.budget, switches=instance.switches
        )
    raise ParameterError(f"unknown instance family {family!r}")


def _jsonable(details: Dict[str, Any]) -> Dict[str, Any]:
    return {
        key: format_fraction(value) if isinstance(value, Fraction) else value
        for key, value in details.items()
    }


class _Recorder:
    """Collects per-step measurements and monitor results during a run."""

    def __init__(self, algorithm: OnlineAlgorithm, config: ExperimentConfig):
        self.algorithm = algorithm
        self.config = config
        self.steps: List[StepRecord] = []
        self.skipped_prefixes = 0
        self.monitors: Dict[str, Dict[str, Any]] = {}
        self._enable("feasibility", config.monitors.feasibility)
        if isinstance(algorithm, LGreedy):
            self._enable("augmenting", config.monitors.augmenting)
        if isinstance(algorithm, DuoHalve):
            for kind in DH_MONITORS:
                self._enable(kind, config.monitors.potential)

    def _enable(self, name: str, enabled: bool) -> None:
        self.monitors[name] = {
            "enabled": enabled,
            "checked": 0,
            "violations": 0,
            "first": None,
        }

    def _fail(self, name: str, index: int, message: str) -> None:
        monitor = self.monitors[name]
        monitor["violations"] += 1
        if monitor["first"] is None:
            monitor["first"] = {"event": index, "message": message}
        logger.error("event %d: %s monitor: %s", index, name, message)

    def _reference(self) -> Optional[Fraction]:
        algorithm = self.algorithm
        if isinstance(algorithm, TargetAndSwitch) and algorithm.yardstick.exact:
            return Fraction(algorithm.reference.value)
        try:
            result = solve(algorithm.problem, algorithm.graph, self.config.oracle.cap)
        except OracleScaleError as e:
            self.skipped_prefixes += 1
            logger.info("prefix %d: no reference value (%s)", algorithm.events - 1, e)
            return None
        return Fraction(result.value)

    def __call__(self, outcome: StepOutcome) -> None:
        algorithm = self.algorithm
        index = outcome.index

        if self.monitors["feasibility"]["enabled"]:
            self.monitors["feasibility"]["checked"] += 1
            touched = list(algorithm.problem.new_elements(outcome.arrival))
            touched.extend(outcome.touched)
            try:
                algorithm.check_feasible(touched)
            except ConsistencyError as e:
                self._fail("feasibility", index, str(e))

        augmenting = self.monitors.get("augmenting")
        if augmenting is not None and augmenting["enabled"]:
            augmenting["checked"] += 1
            try:
                check_no_short_path(algorithm.graph, algorithm.mate, algorithm.max_length)
            except ConsistencyError as e:
                self._fail("augmenting", index, str(e))

        alg = Fraction(algorithm.value)
        ref = self._reference()
        if ref is None:
            ratio = None
        elif isinstance(algorithm, LGreedy):
            ratio = algorithm.ratio_check(int(ref))
        else:
            ratio = competitive_ratio(alg, ref)
        extra = _jsonable(outcome.details)
        if outcome.switched:
            extra["switched"] = True
        self.steps.append(
            StepRecord(
                step=index,
                alg=alg,
                ref=ref,
                ratio=ratio,
                type1=algorithm.ledger.type1_total,
                type2=Fraction(algorithm.ledger.type2_total),
                late_ops=outcome.late_count,
                extra=extra,
            )
        )

    def finish(self) -> Dict[str, Dict[str, Any]]:
        algorithm = self.algorithm
        if isinstance(algorithm, DuoHalve):
            for kind in DH_MONITORS:
                monitor = self.monitors[kind]
                monitor["checked"] = algorithm.checked if monitor["enabled"] else 0
                for violation in algorithm.violations:
                    if violation["kind"] != kind:
                        continue
                    monitor["violations"] += 1
                    if monitor["first"] is None:
                        monitor["first"] = violation

        replayed = {e: v for e, v in algorithm.ledger.replay().items() if v}
        current = {e: v for e, v in algorithm.assignment.items() if v}
        self.monitors["ledger"] = {
            "enabled": True,
            "checked": 1,
            "violations": 0 if replayed == current else 1,
            "first": None,
        }
        if replayed != current:
            self.monitors["ledger"]["first"] = {
                "event": algorithm.events - 1,
                "message": "replaying the ledger does not reproduce the assignment",
            }
        return self.monitors


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def run_experiment(config: ExperimentConfig, source: Optional[Source] = None) -> RunReport:
    """
    Replay an instance through an algorithm and measure everything.

    Args:
        config: Validated experiment configuration
        source: Pre-built stream or adversary; built from ``config.instance`` if omitted

    Returns:
        RunReport: Per-step values, recourse totals, phases and monitor outcomes
    """
    if source is None:
        if config.instance is None:
            raise ParameterError("no instance configured")
        source = build_instance(config.instance, config.algorithm.t)

    algorithm = build_algorithm(config)
    recorder = _Recorder(algorithm, config)

    if isinstance(source, AdaptiveAdversary):
        stream, _ = play(algorithm, source, on_step=recorder)
    else:
        stream = source
        algorithm.problem.check_model(stream.model)
        for event in stream:
            recorder(algorithm.step(event))

    if recorder.skipped_prefixes:
        logger.info(
            "%d of %d prefixes exceeded the oracle cap %d",
            recorder.skipped_prefixes,
            len(recorder.steps),
            config.oracle.cap,
        )
    logger.debug("oracle cache: %s", oracle_cache_info())

    problem = algorithm.problem
    element_count = problem.element_count(algorithm.graph)
    if element_count:
        amortized_type1 = amortized_recourse(algorithm.ledger, element_count, 1)
        amortized_type2 = amortized_recourse(algorithm.ledger, element_count, 2)
    else:
        amortized_type1 = amortized_type2 = Fraction(0)

    params: Dict[str, Any] = {
        "algo": algorithm.name,
        "problem": problem.name,
        "model": stream.model,
        "w_max": format_fraction(problem.w_max),
        "w_min": format_fraction(problem.w_min),
        "oracle_cap": config.oracle.cap,
        "events": len(stream),
        "skipped_prefixes": recorder.skipped_prefixes,
    }
    params.update(algorithm.params())
    if config.instance is not None:
        params["instance"] = config.instance.model_dump(exclude_none=True)
    if isinstance(algorithm, TargetAndSwitch):
        params["switches"] = algorithm.switches
    if isinstance(source, BipartiteISAdversary):
        params["adversary_switches"] = source.switches_seen
        params["lower_bound"] = format_fraction(source.lower_bound())

    monitors = recorder.finish()
    if isinstance(algorithm, LGreedy):
        rows = component_recourse(algorithm.ledger, algorithm.graph)
        monitors["components"] = {
            "enabled": True,
            "rows": [
                {**row, "ratio": format_fraction(row["ratio"])} for row in rows
            ],
            "sum_max": sum_max_holds((row["type1"], row["edges"]) for row in rows),
        }

    report = RunReport(
        label=config.label or stream.label,
        algorithm=algorithm.name,
        problem=problem.name,
        params=params,
        steps=recorder.steps,
        phases=algorithm.phase_report() if isinstance(algorithm, TargetAndSwitch) else [],
        element_count=element_count,
        type1_total=algorithm.ledger.type1_total,
        type2_total=Fraction(algorithm.ledger.type2_total),
        amortized_type1=amortized_type1,
        amortized_type2=amortized_type2,
        monitors=monitors,
    )
    if config.report_path:
        report.write(config.report_path)
    return report


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _upper(name: str, expression: str, bound: Ratio, measured: Ratio) -> BoundCheck:
    status = PASS if measured <= bound else FAIL
    return BoundCheck(name, expression, bound=bound, measured=measured, status=status)


def _ratio_check(report: RunReport, bound: Ratio, expression: str) -> BoundCheck:
    measured = report.max_ratio
    if measured is None:
        return BoundCheck(
            "ratio", expression, bound=bound, note="no prefix has oracle data"
        )
    check = _upper("ratio", expression, bound, measured)
    missing = sum(1 for step in report.steps if step.ratio is None)
    if missing:
        check.note = f"{missing} prefixes without oracle data"
    return check


def _dh_ratio_check(report: RunReport) -> BoundCheck:
    """Per-prefix |A| <= max(OPT, 2 OPT - 2), reported at the prefix with least slack."""
    expression = "|A|/OPT <= max(1, 2 - 2/OPT) per prefix"
    worst: Optional[Tuple[Ratio, Ratio]] = None
    for step in report.steps:
        if step.ref is None:
            continue
        bound = dh_ratio_bound(int(step.ref))
        measured = step.ratio
        if worst is None or bound - measured < worst[0] - worst[1]:
            worst = (bound, measured)
    if worst is None:
        return BoundCheck("ratio", expression, note="no prefix has oracle data")
    return _upper("ratio", expression, *worst)


def _component_check(report: RunReport, bound: Ratio, expression: str) -> BoundCheck:
    """Recourse per edge of the worst connected component."""
    monitor = report.monitors.get("components")
    if not monitor or not monitor.get("rows"):
        return BoundCheck("components", expression, note="no component has edges")
    worst = max(monitor["rows"], key=lambda row: parse_fraction(row["ratio"]))
    check = _upper("components", expression, bound, parse_fraction(worst["ratio"]))
    check.note = f"component of vertex {worst['vertices'][0]}, {worst['edges']} edges"
    return check


def _monitor_check(report: RunReport, name: str, expression: str) -> BoundCheck:
    monitor = report.monitors.get(name)
    if not monitor or not monitor.get("enabled"):
        return BoundCheck(name, expression, note="monitor disabled")
    check = _upper(name, expression, Fraction(0), Fraction(monitor["violations"]))
    if monitor.get("first"):
        check.note = monitor["first"].get("message", "")
    return check


def verify(report: RunReport) -> Tuple[int, List[BoundCheck]]:
    """
    Evaluate the bounds that apply to a report.

    Every comparison uses exact fractions. A ratio check without any oracle
    data is skipped rather than failed.

    Returns:
        Tuple of exit status (0 all pass, 1 some bound violated) and the checks
    """
    params = report.params
    checks: List[BoundCheck] = []

    if report.algorithm == "tas":
        t = to_fraction(params["t"])
        alpha = to_fraction(params.get("alpha", "1"))
        w_max = to_fraction(params.get("w_max", "1"))
        w_min = to_fraction(params.get("w_min", "1"))
        checks.append(_ratio_check(report, t * alpha, "ratio <= t * alpha"))
        checks.append(
            _upper(
                "type1",
                "amortized Type-1 <= (t+1)/(w_min (t-1))",
                type1_bound(t, w_min),
                report.amortized_type1,
            )
        )
        checks.append(
            _upper(
                "type2",
                "amortized Type-2 <= w_max (t+1)/(t-1)",
                type2_bound(t, w_max),
                report.amortized_type2,
            )
        )
        if report.problem == "is" and params.get("yardstick") == "exact":
            checks.append(
                _upper(
                    "independent-set",
                    "amortized Type-1 <= t/(t-1)",
                    independent_set_bound(t),
                    report.amortized_type1,
                )
            )
        if report.phases:
            holds = sum_max_holds((p.type1, p.elements) for p in report.phases)
            checks.append(
                BoundCheck(
                    "phases",
                    "total recourse/elements <= max phase recourse/elements",
                    status=PASS if holds else FAIL,
                )
            )

    elif report.algorithm == "greedy":
        if params.get("t") is not None:
            checks.append(_ratio_check(report, to_fraction(params["t"]), "ratio <= t"))
        else:
            checks.append(BoundCheck("ratio", "ratio <= t", note="no t given"))

    elif report.algorithm == "lgreedy":
        L = int(params["L"])
        checks.append(
            _ratio_check(report, Fraction(L + 2, L + 1), "ratio <= (L+2)/(L+1)")
        )
        expression = "amortized <= (2-t*)/((t*-1)(3-t*)) + (t*-1)/(3-t*)"
        if L >= 1:
            checks.append(
                _upper(
                    "recourse",
                    expression,
                    recourse_bound(params["t_star"]),
                    report.amortized_type1,
                )
            )
            checks.append(
                _component_check(
                    report,
                    recourse_bound(params["t_star"]),
                    "worst component recourse/edges <= same bound",
                )
            )
        else:
            checks.append(BoundCheck("recourse", expression, note="needs L >= 1"))
        checks.append(
            _monitor_check(report, "augmenting", "no augmenting path of length <= 2L+1")
        )

    elif report.algorithm == "dh":
        checks.append(_dh_ratio_check(report))
        checks.append(
            _upper(
                "recourse", "amortized <= 10/3", AMORTIZED_BOUND, report.amortized_type1
            )
        )
        checks.append(
            _monitor_check(report, "potential", "late operations + potential change <= 10/3")
        )
        checks.append(
            _monitor_check(report, "shift", "a shift never fills or flips a half me1")
        )
        checks.append(
            _monitor_check(
                report, "full-me1", "a full me1 has rejected unmatched neighbors"
            )
        )

    else:
        raise ParameterError(f"no bounds known for algorithm {report.algorithm!r}")

    checks.append(_monitor_check(report, "feasibility", "feasible after every event"))
    if "ledger" in report.monitors:
        checks.append(_monitor_check(report, "ledger", "ledger replays to the assignment"))

    status = 1 if any(check.status == FAIL for check in checks) else 0
    return status, checks


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

ALGORITHM_KEYS = set(AlgorithmConfig.model_fields)
INSTANCE_KEYS = set(InstanceConfig.model_fields)


def parse_grid(items: Sequence[str]) -> Dict[str, List[str]]:
    """
    Parse ``KEY=v1,v2,...`` items into an ordered grid.

    A value ``@other`` copies the value of key ``other`` in the same row.
    """
    grid: Dict[str, List[str]] = {}
    for item in items:
        if "=" not in item:
            raise ParameterError(f"grid item {item!r} is not KEY=v1,v2,...")
        key, _, values = item.partition("=")
        key = key.strip()
        if key not in ALGORITHM_KEYS and key not in INSTANCE_KEYS:
            raise ParameterError(f"unknown grid key {key!r}")
        parsed = [v.strip() for v in values.split(",") if v.strip()]
        if not parsed:
            raise ParameterError(f"grid key {key!r} has no values")
        grid[key] = parsed
    if not grid:
        raise ParameterError("the parameter grid is empty")
    return grid


def expand_grid(grid: Dict[str, List[str]]) -> List[Dict[str, str]]:
    """Cartesian product of the grid, with ``@key`` references resolved."""
    keys = list(grid)
    rows = []
    for values in itertools.product(*(grid[k] for k in keys)):
        row = dict(zip(keys, values))
        for key, value in row.items():
            if value.startswith("@"):
                target = value[1:]
                if target not in row or row[target].startswith("@"):
                    raise ParameterError(f"grid reference {value!r} does not name a key")
                row[key] = row[target]
        rows.append(row)
    return rows


def row_config(config: ExperimentConfig, row: Dict[str, str]) -> ExperimentConfig:
    """The experiment configuration of one sweep row."""
    data = config.model_dump()
    data["report_path"] = None
    data["label"] = None
    instance = data.get("instance") or {}
    for key, value in row.items():
        if key in ALGORITHM_KEYS:
            data["algorithm"][key] = value
        else:
            instance[key] = value
    data["instance"] = instance
    return ExperimentConfig(**data)


def _family_columns(config: ExperimentConfig, report: RunReport) -> Dict[str, Any]:
    columns: Dict[str, Any] = {}
    family = config.instance.family if config.instance else None
    algo = config.algorithm
    if family == "path":
        columns["lower_bound"] = format_fraction(path_lower_bound(config.instance.n))
        if report.algorithm == "lgreedy" and int(report.params["L"]) >= 1:
            columns["upper_bound"] = format_fraction(recourse_bound(report.params["t_star"]))
    elif family == "bipartite-is":
        columns["lower_bound"] = report.params.get("lower_bound")
    elif family == "vc-gadget":
        columns["limit"] = format_fraction(GADGET_LIMIT)
    if algo.algo == "tas" and algo.problem == "is" and algo.t is not None:
        columns["is_bound"] = format_fraction(independent_set_bound(algo.t))
    return columns


def sweep_row(config: ExperimentConfig, row: Dict[str, str]) -> Dict[str, Any]:
    """Run and verify one grid point; failures are recorded, not raised."""
    result: Dict[str, Any] = dict(row)
    try:
        row_cfg = row_config(config, row)
        report = run_experiment(row_cfg)
        status, checks = verify(report)
    except (RecourseLabError, ValueError) as e:
        result.update({"status": "error", "error": str(e)})
        return result

    summary = report.summary()
    result.update(
        {
            "label": report.label,
            "elements": report.element_count,
            "type1_total": report.type1_total,
            "amortized_type1": summary["amortized_type1"],
            "amortized_type2": summary["amortized_type2"],
            "final_ratio": summary["final_ratio"],
            "max_ratio": summary["max_ratio"],
            "switches": report.params.get("switches"),
            "status": "pass" if status == 0 else "fail",
            "failed": ";".join(c.name for c in checks if c.status == FAIL),
        }
    )
    result.update(_family_columns(row_cfg, report))
    return result


def _sweep_row_star(args: Tuple[ExperimentConfig, Dict[str, str]]) -> Dict[str, Any]:
    return sweep_row(*args)


def sweep(
    config: ExperimentConfig,
    grid: Dict[str, List[str]],
    workers: int = 1,
    progress: bool = True,
) -> List[Dict[str, Any]]:
    """
    Run every point of ``grid`` and collect one row per point.

    Rows come back in grid order whatever the number of workers.
    """
    rows = expand_grid(grid)
    jobs = [(config, row) for row in rows]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(
                tqdm(
                    executor.map(_sweep_row_star, jobs),
                    total=len(jobs),
                    desc="Sweeping",
                    disable=not progress,
                )
            )
    else:
        results = [
            _sweep_row_star(job)
            for job in tqdm(jobs, desc="Sweeping", disable=not progress)
        ]
    return results


def write_csv(rows: List[Dict[str, Any]], path: Union[str, Path]) -> None:
    """Write sweep rows as UTF-8 CSV; columns in first-seen order."""
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def column_fractions(rows: List[Dict[str, Any]], column: str) -> List[Optional[Ratio]]:
    """Parse one exact-fraction column of sweep rows."""
    return [parse_fraction(row.get(column) or None) for row in rows]
