"""Run grounding methods over a task corpus and compare them.

One record per task and method, never fewer: worker failures are captured in
the record's detail column instead of aborting the run. Methods are the
full-grounding baseline (FG) and the pruning pipeline driven either by the
deterministic relevance backend (SPG-rule) or by an LLM backend (SPG-llm,
which covers the scripted mock as well via the backend config).
"""

from __future__ import annotations

import csv
import dataclasses
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import pddl
from .grounding import DEFAULT_MAX_ACTIONS, ground
from .llm import LlmConfig, PromptTemplate, spg_llm
from .model import StripsTask, build_task
from .pddl import PddlError, format_number
from .search import DEFAULT_TIME_BOUND, SearchOutcome, solve
from .validation import make_validator, validate_plan

METHODS = ("FG", "SPG-rule", "SPG-llm")
METRICS = ("grounded_actions", "grounding_time", "plan_cost", "solving_time")

CSV_HEADER = (
    "task",
    "method",
    "grounded_actions",
    "grounding_time",
    "parse_time",
    "prune_time",
    "solving_time",
    "plan_cost",
    "sound",
    "detail",
)


@dataclass(frozen=True)
class BenchTask:
    task_id: str
    domain_text: str
    problem_text: str


@dataclass
class BenchmarkRecord:
    task: str
    method: str
    grounded_actions: int | None = None
    grounding_time: float | None = None
    parse_time: float | None = None
    prune_time: float | None = None
    solving_time: float | None = None
    plan_cost: Fraction | None = None
    sound: str = "unsolved"  # valid | invalid | unsolved
    detail: str = ""


def _solve_and_judge(
    record: BenchmarkRecord,
    original: StripsTask,
    task: StripsTask,
    time_bound: float,
    max_actions: int,
) -> None:
    """Ground and solve `task`, then judge the plan against `original`."""
    gt = ground(task, max_actions=max_actions)
    record.grounded_actions = gt.stats.num_actions
    record.grounding_time = gt.stats.grounding_time
    result = solve(gt, time_bound)
    record.solving_time = result.solving_time
    if result.outcome is not SearchOutcome.SOLVED:
        record.sound = "unsolved"
        record.detail = (record.detail + f" search: {result.outcome.value}").strip()
        return
    record.plan_cost = result.cost
    verdict = validate_plan(original, result.plan)
    if verdict.valid:
        record.sound = "valid"
    else:
        record.sound = "invalid"
        record.detail = (
            record.detail + f" invalid at step {verdict.step}: {verdict.reason}"
        ).strip()


def _run_one(
    task: BenchTask,
    method: str,
    time_bound: float,
    llm_config: LlmConfig,
    template: PromptTemplate,
    max_actions: int,
) -> BenchmarkRecord:
    record = BenchmarkRecord(task=task.task_id, method=method)
    t0 = time.perf_counter()
    dom = pddl.parse_domain(task.domain_text)
    prob = pddl.parse_problem(task.problem_text, dom)
    original = build_task(dom, prob)
    record.parse_time = time.perf_counter() - t0

    if method == "FG":
        _solve_and_judge(record, original, original, time_bound, max_actions)
        return record

    config = llm_config
    if method == "SPG-rule":
        config = dataclasses.replace(config, backend="rule")
    validator = make_validator(original, time_bound=time_bound)
    t0 = time.perf_counter()
    outcome = spg_llm(
        task.domain_text, task.problem_text, template, config, validator
    )
    record.prune_time = time.perf_counter() - t0
    attempts = len(outcome.attempts)
    if not outcome.accepted:
        record.detail = f"pruning rejected after {attempts} attempt(s)"
        return record
    record.detail = f"accepted after {attempts} attempt(s)"
    pruned_dom = pddl.parse_domain(outcome.domain_text)
    pruned_prob = pddl.parse_problem(outcome.problem_text, pruned_dom)
    pruned = build_task(pruned_dom, pruned_prob)
    _solve_and_judge(record, original, pruned, time_bound, max_actions)
    return record


def run_benchmark(
    tasks: Sequence[BenchTask],
    methods: Sequence[str] = METHODS,
    time_bound: float = DEFAULT_TIME_BOUND,
    llm_config: LlmConfig | None = None,
    template: PromptTemplate | None = None,
    jobs: int = 1,
    max_actions: int = DEFAULT_MAX_ACTIONS,
) -> list[BenchmarkRecord]:
    """Produce exactly one record per (task, method), sorted that way."""
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method '{method}'")
    config = llm_config if llm_config is not None else LlmConfig()
    tmpl = template if template is not None else PromptTemplate()

    def worker(pair: tuple[BenchTask, str]) -> BenchmarkRecord:
        task, method = pair
        try:
            return _run_one(task, method, time_bound, config, tmpl, max_actions)
        except PddlError as exc:
            return BenchmarkRecord(
                task=task.task_id, method=method, detail=f"error: {exc}"
            )

    pairs = [(task, method) for task in tasks for method in methods]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(worker, pairs))
    else:
        records = [worker(pair) for pair in pairs]
    records.sort(key=lambda r: (r.task, r.method))
    return records


# ── Delimited output ─────────────────────────────────────────────────────────


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return format_number(value)
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def emit_csv(records: Sequence[BenchmarkRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.task,
                r.method,
                _fmt(r.grounded_actions),
                _fmt(r.grounding_time),
                _fmt(r.parse_time),
                _fmt(r.prune_time),
                _fmt(r.solving_time),
                _fmt(r.plan_cost),
                r.sound,
                r.detail,
            ]
        )
    return out.getvalue()


@dataclass(frozen=True)
class ScatterPoint:
    task: str
    method: str
    x: float | None  # pruned-method value
    y: float | None  # baseline value
    failed: bool


_SOLUTION_METRICS = ("plan_cost", "solving_time")


def scatter_pairs(
    records: Sequence[BenchmarkRecord], metric: str
) -> list[ScatterPoint]:
    """Pair each pruning record with its task's FG baseline record."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric '{metric}'")
    baselines = {r.task: r for r in records if r.method == "FG"}
    points: list[ScatterPoint] = []
    for r in sorted(records, key=lambda r: (r.task, r.method)):
        if r.method == "FG":
            continue
        base = baselines.get(r.task)
        x = getattr(r, metric)
        y = getattr(base, metric) if base is not None else None
        failed = x is None or y is None
        if metric in _SOLUTION_METRICS and (
            r.sound != "valid" or base is None or base.sound != "valid"
        ):
            failed = True
        points.append(
            ScatterPoint(
                task=r.task,
                method=r.method,
                x=None if x is None else float(x),
                y=None if y is None else float(y),
                failed=failed,
            )
        )
    return points


def emit_scatter(records: Sequence[BenchmarkRecord], metric: str) -> str:
    """Per-task (pruned, baseline) value pairs; failures keep their row."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["task", "method", "x", "y", "failed"])
    for p in scatter_pairs(records, metric):
        writer.writerow(
            [
                p.task,
                p.method,
                "" if p.x is None else f"{p.x:.6f}",
                "" if p.y is None else f"{p.y:.6f}",
                "true" if p.failed else "false",
            ]
        )
    return out.getvalue()
