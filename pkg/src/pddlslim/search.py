"""Satisficing search over a ground task.

Greedy best-first search guided by the additive delete-relaxation heuristic,
with deferred evaluation: successors inherit the heuristic value of their
parent and are only evaluated themselves when popped. Ties break FIFO, and
successors are generated in ascending action-id order, so expansion traces
are reproducible run to run.
"""

from __future__ import annotations

import heapq
import math
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

from .grounding import GroundTask
from .model import Plan, apply_plan, ground_schema, plan_cost, satisfies_equalities
from .pddl import Atom, PddlError, print_domain, print_problem

INFINITY = math.inf

DEFAULT_TIME_BOUND = 60.0
DEFAULT_MAX_CLOSED = 1_000_000


class SearchOutcome(str, Enum):
    SOLVED = "solved"
    UNSOLVABLE = "unsolvable"
    TIMEOUT = "timeout"
    OUT_OF_MEMORY = "out-of-memory"


@dataclass(frozen=True)
class SearchResult:
    outcome: SearchOutcome
    plan: Plan | None
    cost: Fraction | None
    solving_time: float
    expanded: int
    generated: int

    @property
    def solved(self) -> bool:
        return self.outcome is SearchOutcome.SOLVED


class AdditiveHeuristic:
    """h_add: sum over goal atoms of their cheapest relaxed achievement cost.

    Each atom's cost is 0 inside the evaluated state, otherwise the minimum
    over achieving actions of cost(a) plus the summed costs of a's
    preconditions. Computed Dijkstra-style per state.
    """

    def __init__(self, gt: GroundTask) -> None:
        self.goal = gt.goal
        self.costs = [a.cost for a in gt.actions]
        self.pre_sizes = [len(a.pre) for a in gt.actions]
        self.adds = [sorted(a.add) for a in gt.actions]
        self.by_pre: dict[Atom, list[int]] = {}
        self.no_pre: list[int] = []
        for i, a in enumerate(gt.actions):
            if not a.pre:
                self.no_pre.append(i)
            for atom in a.pre:
                self.by_pre.setdefault(atom, []).append(i)

    def __call__(self, state: frozenset[Atom]) -> Fraction | float:
        finalized: dict[Atom, Fraction] = {}
        remaining = list(self.pre_sizes)
        accumulated = list(self.costs)
        heap: list[tuple[Fraction, Atom]] = [(Fraction(0), a) for a in state]
        heapq.heapify(heap)

        def fire(action_id: int) -> None:
            value = accumulated[action_id]
            for atom in self.adds[action_id]:
                if atom not in finalized:
                    heapq.heappush(heap, (value, atom))

        for i in self.no_pre:
            fire(i)
        while heap:
            value, atom = heapq.heappop(heap)
            if atom in finalized:
                continue
            finalized[atom] = value
            for i in self.by_pre.get(atom, ()):
                remaining[i] -= 1
                accumulated[i] += value
                if remaining[i] == 0:
                    fire(i)
        total = Fraction(0)
        for g in self.goal:
            got = finalized.get(g)
            if got is None:
                return INFINITY
            total += got
        return total


def h_add(gt: GroundTask, state: frozenset[Atom]) -> Fraction | float:
    return AdditiveHeuristic(gt)(state)


class _Node:
    __slots__ = ("state", "parent", "action")

    def __init__(self, state, parent, action) -> None:
        self.state = state
        self.parent = parent
        self.action = action


def _extract_plan(node: _Node) -> Plan:
    actions = []
    while node.parent is not None:
        actions.append(node.action)
        node = node.parent
    return Plan(tuple(reversed(actions)))


def solve(
    gt: GroundTask,
    time_bound: float = DEFAULT_TIME_BOUND,
    max_closed: int = DEFAULT_MAX_CLOSED,
) -> SearchResult:
    """Greedy best-first search; never reports an unchecked plan as solved."""
    t0 = time.monotonic()
    deadline = t0 + time_bound

    def result(outcome, plan=None, cost=None):
        return SearchResult(
            outcome=outcome,
            plan=plan,
            cost=cost,
            solving_time=time.monotonic() - t0,
            expanded=expanded,
            generated=generated,
        )

    expanded = 0
    generated = 0
    heuristic = AdditiveHeuristic(gt)
    h0 = heuristic(gt.init)
    if h0 == INFINITY:
        return result(SearchOutcome.UNSOLVABLE)
    counter = 0
    open_list: list[tuple[Fraction | float, int, _Node]] = []
    heapq.heappush(open_list, (h0, counter, _Node(gt.init, None, None)))
    generated += 1
    closed: set[frozenset[Atom]] = set()
    while open_list:
        if time.monotonic() > deadline:
            return result(SearchOutcome.TIMEOUT)
        _, _, node = heapq.heappop(open_list)
        state = node.state
        if state in closed:
            continue
        if len(closed) >= max_closed:
            return result(SearchOutcome.OUT_OF_MEMORY)
        closed.add(state)
        if gt.goal <= state:
            plan = _extract_plan(node)
            final = apply_plan(gt.init, plan)
            if not gt.goal <= final:
                raise RuntimeError("search produced a plan that fails replay")
            return result(SearchOutcome.SOLVED, plan, plan_cost(plan))
        expanded += 1
        h = heuristic(state)
        if h == INFINITY:
            continue
        for action in gt.actions:
            if action.pre <= state:
                successor = (state - action.delete) | action.add
                if successor not in closed:
                    counter += 1
                    heapq.heappush(
                        open_list, (h, counter, _Node(successor, node, action))
                    )
                    generated += 1
    return result(SearchOutcome.UNSOLVABLE)


# ── External planner escape hatch ────────────────────────────────────────────


class ExternalPlannerError(PddlError):
    pass


@dataclass(frozen=True)
class ExternalPlanner:
    """Shell out to another planner.

    `command` is a template whose {domain}, {problem} and {plan} placeholders
    receive file paths; the invoked tool must write one action per line in
    `(name arg1 arg2)` form to the plan path. Exit codes listed in
    `unsolvable_exit_codes` mean "proved unsolvable"; any other non-zero exit
    is treated as a timeout-like failure.
    """

    command: str
    unsolvable_exit_codes: frozenset[int] = frozenset({1})


_STEP_RE = re.compile(r"^\((\S+)((?:\s+\S+)*)\)$")


def parse_plan_text(text: str) -> list[tuple[str, tuple[str, ...]]]:
    steps = []
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip().lower()
        if not line:
            continue
        m = _STEP_RE.match(line)
        if m is None:
            raise ExternalPlannerError(f"unparseable plan line: {raw!r}")
        name = m.group(1)
        args = tuple(m.group(2).split())
        steps.append((name, args))
    return steps


def _steps_to_plan(gt: GroundTask, steps) -> Plan:
    """Re-ground named steps against the task and replay them."""
    task = gt.task
    actions = []
    state = gt.init
    for i, (name, args) in enumerate(steps):
        schema = task.schema_by_name.get(name)
        if schema is None:
            raise ExternalPlannerError(f"step {i}: unknown action '{name}'")
        if len(args) != len(schema.parameters):
            raise ExternalPlannerError(
                f"step {i}: '{name}' takes {len(schema.parameters)} arguments"
            )
        binding = dict(zip(schema.param_names, args))
        if not satisfies_equalities(schema, binding):
            raise ExternalPlannerError(f"step {i}: equality constraint violated")
        action = ground_schema(schema, binding)
        if not action.pre <= state:
            raise ExternalPlannerError(f"step {i}: {action.name} not applicable")
        state = (state - action.delete) | action.add
        actions.append(action)
    if not gt.goal <= state:
        raise ExternalPlannerError("external plan does not reach the goal")
    return Plan(tuple(actions))


def solve_with_external(
    gt: GroundTask,
    planner: ExternalPlanner,
    time_bound: float = DEFAULT_TIME_BOUND,
) -> SearchResult:
    t0 = time.monotonic()

    def result(outcome, plan=None, cost=None):
        return SearchResult(
            outcome=outcome,
            plan=plan,
            cost=cost,
            solving_time=time.monotonic() - t0,
            expanded=0,
            generated=0,
        )

    with tempfile.TemporaryDirectory(prefix="pddlslim-") as tmp:
        domain_path = Path(tmp) / "domain.pddl"
        problem_path = Path(tmp) / "problem.pddl"
        plan_path = Path(tmp) / "plan.txt"
        domain_path.write_text(print_domain(gt.task.domain))
        problem_path.write_text(print_problem(gt.task.problem))
        argv = [
            part.format(
                domain=str(domain_path),
                problem=str(problem_path),
                plan=str(plan_path),
            )
            for part in shlex.split(planner.command)
        ]
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=time_bound)
        except subprocess.TimeoutExpired:
            return result(SearchOutcome.TIMEOUT)
        if proc.returncode != 0:
            if proc.returncode in planner.unsolvable_exit_codes:
                return result(SearchOutcome.UNSOLVABLE)
            return result(SearchOutcome.TIMEOUT)
        if not plan_path.exists():
            return result(SearchOutcome.UNSOLVABLE)
        steps = parse_plan_text(plan_path.read_text())
    plan = _steps_to_plan(gt, steps)
    return result(SearchOutcome.SOLVED, plan, plan_cost(plan))
