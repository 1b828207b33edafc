"""Delete-free reachability grounding.

The reference implementation below recomputes reachable actions the slow
way: instantiate every type- and equality-correct binding up front, then
saturate over ground actions until no new atom appears. It shares nothing
with the production grounder except the task model, so agreement between
the two is meaningful.
"""

import itertools

import pytest

from pddlslim import build_task, parse_domain, parse_problem
from pddlslim.grounding import (
    ResourceExceeded,
    dump_ground_task,
    enumerate_all_bindings,
    ground,
)
from pddlslim.generators import GeneratorSpec, generate_instance
from pddlslim.model import ground_schema, satisfies_equalities
from pddlslim.pddl import Atom

from conftest import fixture_text, load_task


def reference_reachable_actions(task):
    """Slow oracle: full instantiation, then fact saturation."""
    all_actions = []
    for schema in task.schemas:
        pools = [task.objects_of_type(t) for _, t in schema.parameters]
        for combo in itertools.product(*pools):
            binding = dict(zip(schema.param_names, combo))
            if satisfies_equalities(schema, binding):
                all_actions.append(ground_schema(schema, binding))
    facts = set(task.init)
    reachable = set()
    changed = True
    while changed:
        changed = False
        for action in all_actions:
            key = (action.schema, action.binding)
            if key in reachable:
                continue
            if action.pre <= facts:
                reachable.add(key)
                if not action.add <= facts:
                    facts |= action.add
                changed = True
    return reachable, facts


def small_task_corpus():
    tasks = []
    for name in (
        ("bw4_domain.pddl", "bw4_prob.pddl"),
        ("bw5_domain.pddl", "bw5_prob.pddl"),
        ("zeno_domain.pddl", "zeno_prob.pddl"),
        ("typed_domain.pddl", "typed_prob.pddl"),
    ):
        tasks.append(load_task(*name))
    specs = []
    for seed in range(8):
        specs.append(GeneratorSpec("blocksworld4", {"blocks": 3 + seed % 3}, seed))
        specs.append(GeneratorSpec("blocksworld5", {"blocks": 3 + seed % 3}, seed))
        specs.append(
            GeneratorSpec(
                "zeno_like",
                {
                    "cities": 2 + seed % 3,
                    "persons": 1 + seed % 3,
                    "fuel_levels": 2 + seed % 2,
                    "paint": seed % 2,
                },
                seed,
            )
        )
        specs.append(GeneratorSpec("chain", {"length": 1 + seed, "distractors": seed % 4}, seed))
    for spec in specs:
        d, p = generate_instance(spec)
        dom = parse_domain(d)
        tasks.append(build_task(dom, parse_problem(p, dom)))
    return tasks


CORPUS = small_task_corpus()


@pytest.mark.parametrize("index", range(len(CORPUS)))
def test_matches_reference_grounder(index):
    task = CORPUS[index]
    gt = ground(task)
    expected_actions, expected_facts = reference_reachable_actions(task)
    assert {(a.schema, a.binding) for a in gt.actions} == expected_actions
    assert gt.atoms == expected_facts
    assert len(gt.actions) == len(expected_actions)  # no duplicates emitted


def test_known_action_counts(bw4_task, bw5_task):
    assert ground(bw4_task).stats.num_actions == 32
    assert ground(bw5_task).stats.num_actions == 44


def test_unreachable_instances_are_absent():
    # without any (next ...) atom, no refuel or flight is ever enabled,
    # and fuel levels other than the initial one stay unreachable
    dom = parse_domain(fixture_text("zeno_domain.pddl"))
    prob = parse_problem(
        """
        (define (problem stranded) (:domain zeno-mini)
          (:objects a1 - aircraft p1 - person c1 c2 - city f0 f1 - flevel)
          (:init (at-aircraft a1 c1) (fuel-level a1 f0) (at-person p1 c1))
          (:goal (at-person p1 c2)))
        """,
        dom,
    )
    gt = ground(build_task(dom, prob))
    schemas_used = {a.schema for a in gt.actions}
    assert "fly" not in schemas_used
    assert "refuel" not in schemas_used
    assert Atom("fuel-level", ("a1", "f1")) not in gt.atoms
    assert Atom("at-aircraft", ("a1", "c2")) not in gt.atoms
    assert not gt.goal_reachable
    # boarding and painting at the stranded city still ground
    assert "(board p1 a1 c1)" in {a.name for a in gt.actions}


def test_zero_arity_schema_grounds_once():
    dom = parse_domain(
        "(define (domain d) (:predicates (p) (q))"
        " (:action go :parameters () :precondition (p) :effect (q)))"
    )
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (p)) (:goal (q)))", dom
    )
    gt = ground(build_task(dom, prob))
    assert [a.name for a in gt.actions] == ["(go)"]
    assert gt.goal_reachable


def test_unsatisfiable_precondition_grounds_nothing():
    dom = parse_domain(
        "(define (domain d) (:predicates (p) (q) (r))"
        " (:action go :parameters () :precondition (r) :effect (q)))"
    )
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (p)) (:goal (q)))", dom
    )
    gt = ground(build_task(dom, prob))
    assert gt.actions == ()
    assert not gt.goal_reachable
    assert gt.atoms == frozenset({Atom("p")})


def test_chained_rounds_reach_later_facts():
    # step2 only becomes instantiable after step1 fires in round one
    dom = parse_domain(
        "(define (domain d) (:predicates (p0) (p1) (p2))"
        " (:action s1 :parameters () :precondition (p0) :effect (p1))"
        " (:action s2 :parameters () :precondition (p1) :effect (p2)))"
    )
    prob = parse_problem(
        "(define (problem x) (:domain d) (:init (p0)) (:goal (p2)))", dom
    )
    gt = ground(build_task(dom, prob))
    assert {a.name for a in gt.actions} == {"(s1)", "(s2)"}
    assert gt.goal_reachable


def test_goal_reachability_flag(bw4_task):
    assert ground(bw4_task).goal_reachable


def test_determinism(bw5_task):
    first = ground(bw5_task)
    second = ground(bw5_task)
    assert [a.name for a in first.actions] == [a.name for a in second.actions]
    assert first.atoms == second.atoms


def test_resource_ceiling(bw4_task):
    with pytest.raises(ResourceExceeded) as exc:
        ground(bw4_task, max_actions=10)
    assert exc.value.limit == 10
    assert "10" in str(exc.value)


def test_enumerate_all_bindings_is_superset():
    for task in CORPUS[:12]:
        reachable = ground(task)
        every = enumerate_all_bindings(task)
        lhs = {(a.schema, a.binding) for a in reachable.actions}
        rhs = {(a.schema, a.binding) for a in every.actions}
        assert lhs <= rhs
        assert reachable.atoms <= every.atoms


def test_enumerate_all_bindings_respects_types(typed_task):
    every = enumerate_all_bindings(typed_task)
    hitches = [a for a in every.actions if a.schema == "hitch"]
    # one truck, one car, three locations
    assert len(hitches) == 3
    drives = [a for a in every.actions if a.schema == "drive"]
    assert len(drives) == 2 * 3 * 3


def test_enumerate_ceiling_precedes_instantiation(bw4_task):
    with pytest.raises(ResourceExceeded):
        enumerate_all_bindings(bw4_task, max_actions=3)


def test_stats_are_populated(bw4_task):
    gt = ground(bw4_task)
    assert gt.stats.num_actions == len(gt.actions) == 32
    assert gt.stats.num_atoms == len(gt.atoms)
    assert gt.stats.grounding_time >= 0.0


def test_dump_is_stable_and_sorted(bw4_task):
    gt = ground(bw4_task)
    text = dump_ground_task(gt)
    assert text == dump_ground_task(ground(bw4_task))
    lines = text.splitlines()
    atoms_at = lines.index(";; atoms")
    actions_at = lines.index(";; actions")
    atom_lines = lines[atoms_at + 1 : actions_at]
    action_lines = lines[actions_at + 1 :]
    assert atom_lines == sorted(atom_lines)
    assert action_lines == sorted(action_lines)
    assert len(action_lines) == 32
