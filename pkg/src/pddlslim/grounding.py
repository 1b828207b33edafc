"""Ground a task by delete-free reachability.

A schema instance is emitted once all of its precondition atoms are
reachable; delete effects are ignored for reachability, so the result is the
usual relaxed-reachable superset of the truly applicable actions.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterator, Mapping

from .model import (
    GroundAction,
    StripsTask,
    ground_schema,
    satisfies_equalities,
)
from .pddl import Atom, PddlError, SchemaAst

DEFAULT_MAX_ACTIONS = 10_000_000


class ResourceExceeded(PddlError):
    def __init__(self, limit: int) -> None:
        super().__init__(f"grounding exceeded the {limit} action ceiling")
        self.limit = limit


@dataclass(frozen=True)
class GroundingStats:
    num_actions: int
    num_atoms: int
    grounding_time: float


@dataclass(frozen=True)
class GroundTask:
    task: StripsTask
    atoms: frozenset[Atom]
    actions: tuple[GroundAction, ...]
    init: frozenset[Atom]
    goal: frozenset[Atom]
    goal_reachable: bool
    stats: GroundingStats


class _TypeIndex:
    """Objects per type, computed once per grounding run."""

    def __init__(self, task: StripsTask) -> None:
        self.task = task
        self._cache: dict[str, tuple[str, ...]] = {}

    def objects_for(self, type_name: str) -> tuple[str, ...]:
        got = self._cache.get(type_name)
        if got is None:
            got = self.task.objects_of_type(type_name)
            self._cache[type_name] = got
        return got


def _match_schema(
    schema: SchemaAst,
    facts: frozenset[Atom],
    index: Mapping[str, list[Atom]],
    types: _TypeIndex,
    task: StripsTask,
) -> Iterator[tuple[str, ...]]:
    """Yield every binding whose ground precondition lies inside `facts`.

    Ordered join: precondition atoms are visited most-selective first (fewest
    candidate facts), each extending a partial binding; parameters untouched
    by any precondition atom are enumerated from the type index at the end.
    """
    pre = schema.precondition
    order = sorted(
        range(len(pre)),
        key=lambda i: (len(index.get(pre[i].predicate, ())), i),
    )
    ptype = dict(schema.parameters)
    names = schema.param_names

    def extend(step: int, binding: dict[str, str]) -> Iterator[tuple[str, ...]]:
        if step == len(order):
            free = [v for v in names if v not in binding]
            pools = [types.objects_for(ptype[v]) for v in free]
            for combo in itertools.product(*pools):
                full = dict(binding)
                full.update(zip(free, combo))
                if satisfies_equalities(schema, full):
                    yield tuple(full[v] for v in names)
            return
        atom = pre[order[step]]
        if all(arg in binding for arg in atom.args):
            ground = Atom(atom.predicate, tuple(binding[a] for a in atom.args))
            if ground in facts:
                yield from extend(step + 1, binding)
            return
        for fact in index.get(atom.predicate, ()):
            new = dict(binding)
            ok = True
            for var, obj in zip(atom.args, fact.args):
                bound = new.get(var)
                if bound is None:
                    obj_type = task.objects.get(obj)
                    if obj_type is None or not task.is_subtype(obj_type, ptype[var]):
                        ok = False
                        break
                    new[var] = obj
                elif bound != obj:
                    ok = False
                    break
            if ok:
                yield from extend(step + 1, new)

    yield from extend(0, {})


def ground(task: StripsTask, max_actions: int = DEFAULT_MAX_ACTIONS) -> GroundTask:
    """Compute the delete-free reachable atoms and actions of a task.

    Runs round-based: each round matches every schema against a snapshot of
    the reachable facts and collects new instances; it stops on the first
    round that adds no facts, at which point every instance enabled by the
    final fact set has been seen.
    """
    t0 = time.perf_counter()
    types = _TypeIndex(task)
    facts: set[Atom] = set(task.init)
    actions: list[GroundAction] = []
    seen: set[tuple[str, tuple[str, ...]]] = set()
    while True:
        snapshot = frozenset(facts)
        index: dict[str, list[Atom]] = {}
        for atom in sorted(snapshot):
            index.setdefault(atom.predicate, []).append(atom)
        grew = False
        for schema in task.schemas:
            names = schema.param_names
            for binding_values in _match_schema(schema, snapshot, index, types, task):
                key = (schema.name, binding_values)
                if key in seen:
                    continue
                seen.add(key)
                action = ground_schema(schema, dict(zip(names, binding_values)))
                actions.append(action)
                if len(actions) > max_actions:
                    raise ResourceExceeded(max_actions)
                fresh = action.add - facts
                if fresh:
                    facts |= fresh
                    grew = True
        if not grew:
            break
    atoms = frozenset(facts)
    stats = GroundingStats(
        num_actions=len(actions),
        num_atoms=len(atoms),
        grounding_time=time.perf_counter() - t0,
    )
    return GroundTask(
        task=task,
        atoms=atoms,
        actions=tuple(actions),
        init=task.init,
        goal=task.goal,
        goal_reachable=task.goal <= atoms,
        stats=stats,
    )


def enumerate_all_bindings(
    task: StripsTask, max_actions: int = DEFAULT_MAX_ACTIONS
) -> GroundTask:
    """Instantiate every type-correct binding, reachable or not.

    This ignores preconditions entirely apart from equality constraints, so
    its action set is a superset of what `ground` produces.
    """
    t0 = time.perf_counter()
    types = _TypeIndex(task)
    total = 0
    for schema in task.schemas:
        count = 1
        for _, tname in schema.parameters:
            count *= len(types.objects_for(tname))
        total += count
        if total > max_actions:
            raise ResourceExceeded(max_actions)
    actions: list[GroundAction] = []
    for schema in task.schemas:
        names = schema.param_names
        pools = [types.objects_for(t) for _, t in schema.parameters]
        for combo in itertools.product(*pools):
            binding = dict(zip(names, combo))
            if not satisfies_equalities(schema, binding):
                continue
            actions.append(ground_schema(schema, binding))
    atoms = set(task.init)
    for action in actions:
        atoms |= action.pre
        atoms |= action.add
    stats = GroundingStats(
        num_actions=len(actions),
        num_atoms=len(atoms),
        grounding_time=time.perf_counter() - t0,
    )
    return GroundTask(
        task=task,
        atoms=frozenset(atoms),
        actions=tuple(actions),
        init=task.init,
        goal=task.goal,
        goal_reachable=task.goal <= atoms,
        stats=stats,
    )


def dump_ground_task(gt: GroundTask) -> str:
    """Newline-delimited rendering with a stable sort order."""
    lines = [";; atoms"]
    lines.extend(str(a) for a in sorted(gt.atoms))
    lines.append(";; actions")
    lines.extend(a.name for a in sorted(gt.actions, key=GroundAction.sort_key))
    return "\n".join(lines) + "\n"
