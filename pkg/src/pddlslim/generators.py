"""Deterministic task generators for the benchmark corpus.

Four families: two blocksworld variants (the five-operator one carries the
redundant block-to-block move), a typed air-travel family with fuel levels
and a costlier-on-fuel zoom flight, and a linear chain family for planner
tests. The same spec always yields byte-identical files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .pddl import PddlError

FAMILIES = ("blocksworld4", "blocksworld5", "zeno_like", "chain")


class InvalidSpec(PddlError):
    pass


@dataclass
class GeneratorSpec:
    family: str
    size: dict[str, int] = field(default_factory=dict)
    seed: int = 0


def instance_name(spec: GeneratorSpec) -> str:
    parts = [f"{k}{v}" for k, v in sorted(spec.size.items())]
    return "-".join([spec.family, *parts, f"s{spec.seed}"])


def _get(spec: GeneratorSpec, key: str, default: int, minimum: int) -> int:
    value = spec.size.get(key, default)
    if not isinstance(value, int) or value < minimum:
        raise InvalidSpec(
            f"{spec.family}: parameter '{key}' must be an integer >= {minimum}"
        )
    return value


# ── Blocksworld ──────────────────────────────────────────────────────────────

_BW_CORE = """\
(define (domain {name})
  (:requirements :strips :equality{costs_req})
  (:predicates
    (on ?x ?y)
    (ontable ?x)
    (clear ?x)
    (handempty)
    (holding ?x)){functions}
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty))
                 (holding ?x)))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y) (not (= ?x ?y)))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty)
                 (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty) (not (= ?x ?y)))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty))
                 (not (on ?x ?y)))){extra})
"""

# Redundant by construction: pick-up followed by stack has the same net
# effect at the same total cost, which is what makes this schema a
# pruning target.
_BW_MOVE = """

  (:action move-b-to-b
    :parameters (?x ?y)
    :precondition (and (clear ?x) (ontable ?x) (handempty) (clear ?y)
                       (not (= ?x ?y)))
    :effect (and (not (ontable ?x)) (not (clear ?y)) (on ?x ?y)
                 (increase (total-cost) 2)))"""


def _blocksworld(spec: GeneratorSpec, with_move: bool) -> tuple[str, str]:
    blocks = _get(spec, "blocks", 4, 2)
    goal_blocks = _get(spec, "goal_blocks", blocks, 2)
    if goal_blocks > blocks:
        raise InvalidSpec(f"{spec.family}: goal_blocks exceeds blocks")
    rng = random.Random(spec.seed)
    names = [f"b{i}" for i in range(1, blocks + 1)]

    shuffled = list(names)
    rng.shuffle(shuffled)
    stacks: list[list[str]] = []
    for block in shuffled:
        if not stacks or rng.random() < 0.4:
            stacks.append([block])
        else:
            stacks[-1].append(block)
    init: list[str] = []
    for stack in stacks:
        init.append(f"(ontable {stack[0]})")
        for below, above in zip(stack, stack[1:]):
            init.append(f"(on {above} {below})")
        init.append(f"(clear {stack[-1]})")
    init.append("(handempty)")

    tower = rng.sample(names, goal_blocks)
    goal = [f"(on {a} {b})" for a, b in zip(tower, tower[1:])]

    domain_name = spec.family
    domain = _BW_CORE.format(
        name=domain_name,
        extra=_BW_MOVE if with_move else "",
        costs_req=" :action-costs" if with_move else "",
        functions="\n  (:functions (total-cost))" if with_move else "",
    )
    if with_move:
        init.append("(= (total-cost) 0)")
    metric = "\n  (:metric minimize (total-cost))" if with_move else ""
    problem = (
        f"(define (problem {instance_name(spec)})\n"
        f"  (:domain {domain_name})\n"
        f"  (:objects {' '.join(names)})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)})){metric})\n"
    )
    return domain, problem


# ── Air travel ───────────────────────────────────────────────────────────────

_ZENO_DOMAIN = """\
(define (domain zeno_like)
  (:requirements :strips :typing :action-costs :equality)
  (:types aircraft person city flevel - object)
  (:predicates
    (at-person ?p - person ?c - city)
    (at-aircraft ?a - aircraft ?c - city)
    (in ?p - person ?a - aircraft)
    (fuel-level ?a - aircraft ?l - flevel)
    (next ?l1 - flevel ?l2 - flevel){paint_pred})
  (:functions (total-cost))
  (:action board
    :parameters (?p - person ?a - aircraft ?c - city)
    :precondition (and (at-person ?p ?c) (at-aircraft ?a ?c))
    :effect (and (not (at-person ?p ?c)) (in ?p ?a)
                 (increase (total-cost) 1)))
  (:action debark
    :parameters (?p - person ?a - aircraft ?c - city)
    :precondition (and (in ?p ?a) (at-aircraft ?a ?c))
    :effect (and (not (in ?p ?a)) (at-person ?p ?c)
                 (increase (total-cost) 1)))
  (:action fly
    :parameters (?a - aircraft ?c1 - city ?c2 - city ?l1 - flevel ?l2 - flevel)
    :precondition (and (at-aircraft ?a ?c1) (fuel-level ?a ?l1)
                       (next ?l2 ?l1) (not (= ?c1 ?c2)))
    :effect (and (not (at-aircraft ?a ?c1)) (at-aircraft ?a ?c2)
                 (not (fuel-level ?a ?l1)) (fuel-level ?a ?l2)
                 (increase (total-cost) 3)))
  (:action zoom
    :parameters (?a - aircraft ?c1 - city ?c2 - city
                 ?l1 - flevel ?l2 - flevel ?l3 - flevel)
    :precondition (and (at-aircraft ?a ?c1) (fuel-level ?a ?l1)
                       (next ?l2 ?l1) (next ?l3 ?l2) (not (= ?c1 ?c2)))
    :effect (and (not (at-aircraft ?a ?c1)) (at-aircraft ?a ?c2)
                 (not (fuel-level ?a ?l1)) (fuel-level ?a ?l3)
                 (increase (total-cost) 2)))
  (:action refuel
    :parameters (?a - aircraft ?c - city ?l1 - flevel ?l2 - flevel)
    :precondition (and (at-aircraft ?a ?c) (fuel-level ?a ?l1) (next ?l1 ?l2))
    :effect (and (not (fuel-level ?a ?l1)) (fuel-level ?a ?l2)
                 (increase (total-cost) 1))){paint_action})
"""

_ZENO_PAINT_PRED = "\n    (painted ?a - aircraft)"

_ZENO_PAINT_ACTION = """

  (:action paint
    :parameters (?a - aircraft ?c - city)
    :precondition (and (at-aircraft ?a ?c))
    :effect (and (painted ?a) (increase (total-cost) 1)))"""


def _zeno_like(spec: GeneratorSpec) -> tuple[str, str]:
    cities = _get(spec, "cities", 3, 2)
    aircraft = _get(spec, "aircraft", 1, 1)
    persons = _get(spec, "persons", 2, 1)
    fuel_levels = _get(spec, "fuel_levels", 3, 2)
    goal_persons = _get(spec, "goal_persons", max(1, persons // 2), 1)
    paint = _get(spec, "paint", 0, 0)
    if goal_persons > persons:
        raise InvalidSpec("zeno_like: goal_persons exceeds persons")
    rng = random.Random(spec.seed)

    city_names = [f"c{i}" for i in range(1, cities + 1)]
    plane_names = [f"a{i}" for i in range(1, aircraft + 1)]
    person_names = [f"p{i}" for i in range(1, persons + 1)]
    fuel_names = [f"f{i}" for i in range(fuel_levels)]

    init: list[str] = []
    for lo, hi in zip(fuel_names, fuel_names[1:]):
        init.append(f"(next {lo} {hi})")
    for plane in plane_names:
        init.append(f"(at-aircraft {plane} {rng.choice(city_names)})")
        init.append(f"(fuel-level {plane} {rng.choice(fuel_names)})")
    start: dict[str, str] = {}
    for person in person_names:
        start[person] = rng.choice(city_names)
        init.append(f"(at-person {person} {start[person]})")
    init.append("(= (total-cost) 0)")

    goal: list[str] = []
    for person in person_names[:goal_persons]:
        others = [c for c in city_names if c != start[person]]
        goal.append(f"(at-person {person} {rng.choice(others)})")

    objects = (
        f"{' '.join(plane_names)} - aircraft "
        f"{' '.join(person_names)} - person "
        f"{' '.join(city_names)} - city "
        f"{' '.join(fuel_names)} - flevel"
    )
    domain = _ZENO_DOMAIN.format(
        paint_pred=_ZENO_PAINT_PRED if paint else "",
        paint_action=_ZENO_PAINT_ACTION if paint else "",
    )
    problem = (
        f"(define (problem {instance_name(spec)})\n"
        f"  (:domain zeno_like)\n"
        f"  (:objects {objects})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goal)}))\n"
        f"  (:metric minimize (total-cost)))\n"
    )
    return domain, problem


# ── Chain ────────────────────────────────────────────────────────────────────


def _chain(spec: GeneratorSpec) -> tuple[str, str]:
    length = _get(spec, "length", 2, 1)
    distractors = _get(spec, "distractors", 0, 0)
    predicates = [f"(p{i})" for i in range(length + 1)]
    predicates += [f"(q{j})" for j in range(1, distractors + 1)]
    actions = []
    for i in range(1, length + 1):
        actions.append(
            f"  (:action step{i}\n"
            f"    :parameters ()\n"
            f"    :precondition (p{i - 1})\n"
            f"    :effect (p{i}))"
        )
    for j in range(1, distractors + 1):
        actions.append(
            f"  (:action dstep{j}\n"
            f"    :parameters ()\n"
            f"    :precondition (p0)\n"
            f"    :effect (q{j}))"
        )
    domain = (
        "(define (domain chain)\n"
        "  (:requirements :strips)\n"
        f"  (:predicates {' '.join(predicates)})\n" + "\n".join(actions) + ")\n"
    )
    problem = (
        f"(define (problem {instance_name(spec)})\n"
        "  (:domain chain)\n"
        "  (:init (p0))\n"
        f"  (:goal (p{length})))\n"
    )
    return domain, problem


_SIZE_LADDER: dict[str, tuple[dict[str, int], ...]] = {
    "blocksworld4": ({"blocks": 3}, {"blocks": 4}, {"blocks": 5}),
    "blocksworld5": ({"blocks": 3}, {"blocks": 4}, {"blocks": 5}),
    "zeno_like": (
        {"cities": 3, "aircraft": 1, "persons": 2, "fuel_levels": 3},
        {"cities": 3, "aircraft": 2, "persons": 3, "fuel_levels": 3, "paint": 1},
        {"cities": 4, "aircraft": 2, "persons": 4, "fuel_levels": 4, "paint": 1},
    ),
    "chain": (
        {"length": 3},
        {"length": 6, "distractors": 2},
        {"length": 10, "distractors": 4},
    ),
}


def corpus_specs(
    families: tuple[str, ...] | list[str],
    count: int,
    base_seed: int = 0,
) -> list[GeneratorSpec]:
    """A size ladder per family, `count` instances each, seeds offset in order."""
    specs: list[GeneratorSpec] = []
    for family in families:
        ladder = _SIZE_LADDER.get(family)
        if ladder is None:
            raise InvalidSpec(f"unknown family '{family}'")
        for i in range(count):
            specs.append(
                GeneratorSpec(family, dict(ladder[i % len(ladder)]), base_seed + i)
            )
    return specs


def generate_instance(spec: GeneratorSpec) -> tuple[str, str]:
    """Produce (domain_text, problem_text); same spec, same bytes."""
    known = {
        "blocksworld4": {"blocks", "goal_blocks"},
        "blocksworld5": {"blocks", "goal_blocks"},
        "zeno_like": {
            "cities",
            "aircraft",
            "persons",
            "fuel_levels",
            "goal_persons",
            "paint",
        },
        "chain": {"length", "distractors"},
    }
    if spec.family not in known:
        raise InvalidSpec(f"unknown family '{spec.family}'")
    stray = set(spec.size) - known[spec.family]
    if stray:
        raise InvalidSpec(
            f"{spec.family}: unknown parameter '{sorted(stray)[0]}'"
        )
    if spec.family == "blocksworld4":
        return _blocksworld(spec, with_move=False)
    if spec.family == "blocksworld5":
        return _blocksworld(spec, with_move=True)
    if spec.family == "zeno_like":
        return _zeno_like(spec)
    return _chain(spec)
