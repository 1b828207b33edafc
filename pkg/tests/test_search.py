"""Heuristic, search, and the external-planner escape hatch.

The reference h_add below is a Bellman-Ford style fixpoint, deliberately
structured unlike the production Dijkstra-with-counters version.
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

from pddlslim import build_task, parse_domain, parse_problem, validate_plan
from pddlslim.grounding import ground
from pddlslim.model import apply_action, is_applicable, plan_cost
from pddlslim.search import (
    INFINITY,
    AdditiveHeuristic,
    ExternalPlanner,
    ExternalPlannerError,
    SearchOutcome,
    h_add,
    parse_plan_text,
    solve,
    solve_with_external,
)

from conftest import FIXTURES, load_task


def tiny_task(domain: str, problem: str):
    dom = parse_domain(domain)
    return build_task(dom, parse_problem(problem, dom))


def reference_h_add(gt, state):
    cost = {atom: Fraction(0) for atom in state}
    changed = True
    while changed:
        changed = False
        for action in gt.actions:
            if any(p not in cost for p in action.pre):
                continue
            through = action.cost + sum((cost[p] for p in action.pre), Fraction(0))
            for atom in action.add:
                if atom not in cost or through < cost[atom]:
                    cost[atom] = through
                    changed = True
    total = Fraction(0)
    for g in gt.goal:
        if g not in cost:
            return INFINITY
        total += cost[g]
    return total


# ── h_add ────────────────────────────────────────────────────────────────────


def test_h_add_on_a_unit_chain():
    task = tiny_task(
        "(define (domain d) (:predicates (p0) (p1) (p2))"
        " (:action s1 :parameters () :precondition (p0) :effect (p1))"
        " (:action s2 :parameters () :precondition (p1) :effect (p2)))",
        "(define (problem x) (:domain d) (:init (p0)) (:goal (p2)))",
    )
    gt = ground(task)
    assert h_add(gt, gt.init) == Fraction(2)


def test_h_add_counts_shared_achievers_twice():
    # one action gives both goal atoms; the additive estimate pays for it
    # once per atom, which is exactly what makes it inadmissible
    task = tiny_task(
        "(define (domain d) (:predicates (s) (a) (b))"
        " (:action both :parameters () :precondition (s) :effect (and (a) (b))))",
        "(define (problem x) (:domain d) (:init (s)) (:goal (and (a) (b))))",
    )
    gt = ground(task)
    assert h_add(gt, gt.init) == Fraction(2)


def test_h_add_uses_action_costs(zeno_task):
    gt = ground(zeno_task)
    h = AdditiveHeuristic(gt)
    # moving p2 from c2 to c3 requires at least board+fly+debark machinery,
    # and every estimate stays an exact Fraction
    value = h(gt.init)
    assert isinstance(value, Fraction)
    assert value > 0


def test_h_add_zero_on_goal_states(bw4_task):
    gt = ground(bw4_task)
    h = AdditiveHeuristic(gt)
    result = solve(gt, 30.0)
    final = bw4_task.init
    for action in result.plan:
        final = apply_action(final, action)
    assert h(final) == Fraction(0)


def test_h_add_infinite_when_goal_unreachable():
    task = tiny_task(
        "(define (domain d) (:predicates (p) (q) (r))"
        " (:action go :parameters () :precondition (r) :effect (q)))",
        "(define (problem x) (:domain d) (:init (p)) (:goal (q)))",
    )
    gt = ground(task)
    assert h_add(gt, gt.init) == INFINITY


@pytest.mark.parametrize(
    "fixture",
    [
        ("bw4_domain.pddl", "bw4_prob.pddl"),
        ("bw5_domain.pddl", "bw5_prob.pddl"),
        ("zeno_domain.pddl", "zeno_prob.pddl"),
        ("typed_domain.pddl", "typed_prob.pddl"),
    ],
)
def test_h_add_matches_reference(fixture):
    task = load_task(*fixture)
    gt = ground(task)
    h = AdditiveHeuristic(gt)
    states = [gt.init]
    state = gt.init
    for action in gt.actions:  # a short deterministic walk
        if is_applicable(state, action):
            state = apply_action(state, action)
            states.append(state)
        if len(states) > 6:
            break
    for s in states:
        assert h(s) == reference_h_add(gt, s)


# ── Greedy best-first search ─────────────────────────────────────────────────


def test_solves_blocks_and_plan_replays(bw4_task):
    gt = ground(bw4_task)
    result = solve(gt, 30.0)
    assert result.outcome is SearchOutcome.SOLVED
    assert result.solved
    verdict = validate_plan(bw4_task, result.plan)
    assert verdict.valid
    assert result.cost == plan_cost(result.plan)
    assert result.expanded > 0
    assert result.generated >= result.expanded


def test_empty_plan_when_goal_already_holds():
    task = tiny_task(
        "(define (domain d) (:predicates (p) (q))"
        " (:action go :parameters () :precondition (p) :effect (q)))",
        "(define (problem x) (:domain d) (:init (p)) (:goal (p)))",
    )
    result = solve(ground(task), 10.0)
    assert result.solved
    assert len(result.plan) == 0
    assert result.cost == Fraction(0)


def test_unsolvable_when_goal_unreachable():
    task = tiny_task(
        "(define (domain d) (:predicates (p) (q) (r))"
        " (:action go :parameters () :precondition (r) :effect (q)))",
        "(define (problem x) (:domain d) (:init (p)) (:goal (q)))",
    )
    result = solve(ground(task), 10.0)
    assert result.outcome is SearchOutcome.UNSOLVABLE
    assert result.plan is None


def test_unsolvable_beyond_the_relaxation():
    # both goal atoms are delete-free reachable, but every real state
    # holds at most one of them, so exhaustion must report unsolvable
    task = tiny_task(
        "(define (domain d) (:predicates (a) (p) (q))"
        " (:action x :parameters () :precondition (a) :effect (and (p) (not (a))))"
        " (:action y :parameters () :precondition (a) :effect (and (q) (not (a)))))",
        "(define (problem z) (:domain d) (:init (a)) (:goal (and (p) (q))))",
    )
    gt = ground(task)
    assert gt.goal_reachable  # the relaxation is fooled
    result = solve(gt, 10.0)
    assert result.outcome is SearchOutcome.UNSOLVABLE


def test_timeout(bw5_task):
    result = solve(ground(bw5_task), 0.0)
    assert result.outcome is SearchOutcome.TIMEOUT
    assert result.plan is None
    assert result.solving_time >= 0.0


def test_out_of_memory(bw4_task):
    result = solve(ground(bw4_task), 30.0, max_closed=1)
    assert result.outcome is SearchOutcome.OUT_OF_MEMORY


def test_search_is_deterministic(bw5_task):
    gt = ground(bw5_task)
    first = solve(gt, 30.0)
    second = solve(gt, 30.0)
    assert first.plan == second.plan
    assert (first.expanded, first.generated) == (second.expanded, second.generated)


def test_solves_the_whole_fixture_set():
    for pair in (
        ("bw4_domain.pddl", "bw4_prob.pddl"),
        ("bw5_domain.pddl", "bw5_prob.pddl"),
        ("zeno_domain.pddl", "zeno_prob.pddl"),
        ("typed_domain.pddl", "typed_prob.pddl"),
    ):
        task = load_task(*pair)
        result = solve(ground(task), 30.0)
        assert result.solved, pair
        assert validate_plan(task, result.plan).valid, pair


# ── Plan-text parsing ────────────────────────────────────────────────────────


def test_parse_plan_text_tolerates_noise():
    text = "; preamble\n\n(Pick-Up B1) ; step\n(GO)\n  (stack b1 b2)  \n"
    assert parse_plan_text(text) == [
        ("pick-up", ("b1",)),
        ("go", ()),
        ("stack", ("b1", "b2")),
    ]


def test_parse_plan_text_rejects_garbage():
    with pytest.raises(ExternalPlannerError):
        parse_plan_text("pick-up b1\n")
    with pytest.raises(ExternalPlannerError):
        parse_plan_text("(unclosed b1\n")


# ── External planner ─────────────────────────────────────────────────────────

FAKE = FIXTURES / "fake_planner.py"


def planner(mode: str, **kwargs) -> ExternalPlanner:
    cmd = f"{sys.executable} {FAKE} {mode} {{domain}} {{problem}} {{plan}}"
    return ExternalPlanner(cmd, **kwargs)


def test_external_solve_round_trip(bw4_task):
    gt = ground(bw4_task)
    result = solve_with_external(gt, planner("solve"), 60.0)
    assert result.solved
    assert validate_plan(bw4_task, result.plan).valid
    assert result.cost == plan_cost(result.plan)


def test_external_noisy_output_is_parsed(bw4_task):
    gt = ground(bw4_task)
    result = solve_with_external(gt, planner("noisy"), 60.0)
    assert result.solved
    assert validate_plan(bw4_task, result.plan).valid


def test_external_unsolvable_exit_code(bw4_task):
    gt = ground(bw4_task)
    result = solve_with_external(gt, planner("unsolvable"), 60.0)
    assert result.outcome is SearchOutcome.UNSOLVABLE


def test_external_unexpected_exit_code_is_failure(bw4_task):
    gt = ground(bw4_task)
    result = solve_with_external(gt, planner("fail"), 60.0)
    assert result.outcome is SearchOutcome.TIMEOUT


def test_external_exit_code_mapping_is_configurable(bw4_task):
    gt = ground(bw4_task)
    custom = planner("fail", unsolvable_exit_codes=frozenset({3}))
    result = solve_with_external(gt, custom, 60.0)
    assert result.outcome is SearchOutcome.UNSOLVABLE


def test_external_success_without_plan_file(bw4_task):
    gt = ground(bw4_task)
    result = solve_with_external(gt, planner("empty"), 60.0)
    assert result.outcome is SearchOutcome.UNSOLVABLE


def test_external_inapplicable_plan_is_an_error(bw4_task):
    gt = ground(bw4_task)
    with pytest.raises(ExternalPlannerError):
        solve_with_external(gt, planner("badplan"), 60.0)


def test_external_wall_clock_timeout(bw4_task):
    gt = ground(bw4_task)
    result = solve_with_external(gt, planner("sleep"), 0.5)
    assert result.outcome is SearchOutcome.TIMEOUT
