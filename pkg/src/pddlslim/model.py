"""STRIPS task semantics: states, ground actions, plans, transitions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .pddl import (
    Atom,
    DomainAst,
    PddlError,
    PredicateDecl,
    ProblemAst,
    ROOT_TYPE,
    SchemaAst,
    TaskTypeError,
    UnknownObjectType,
    build_parent_map,
    check_ground_atom,
    is_subtype,
)

GroundAtom = Atom

State = frozenset


class MissingDomain(PddlError):
    def __init__(self, wanted: str, got: str) -> None:
        super().__init__(f"problem requires domain '{wanted}', got '{got}'")
        self.wanted = wanted
        self.got = got


class NotApplicable(PddlError):
    def __init__(self, action: str) -> None:
        super().__init__(f"action {action} is not applicable")
        self.action = action


class NotApplicableAt(PddlError):
    def __init__(self, index: int, action: str) -> None:
        super().__init__(f"plan step {index} ({action}) is not applicable")
        self.index = index
        self.action = action


@dataclass(frozen=True)
class GroundAction:
    """A schema instantiated with a binding, with ground effect sets."""

    schema: str
    binding: tuple[str, ...]
    pre: frozenset[Atom]
    add: frozenset[Atom]
    delete: frozenset[Atom]
    cost: Fraction = Fraction(1)

    @property
    def name(self) -> str:
        if not self.binding:
            return f"({self.schema})"
        return f"({self.schema} {' '.join(self.binding)})"

    def sort_key(self) -> tuple[str, tuple[str, ...]]:
        return (self.schema, self.binding)


@dataclass(frozen=True)
class Plan:
    actions: tuple[GroundAction, ...] = ()

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self) -> Iterator[GroundAction]:
        return iter(self.actions)

    def steps(self) -> list[tuple[str, tuple[str, ...]]]:
        return [(a.schema, a.binding) for a in self.actions]

    def to_text(self) -> str:
        """One action per line, the shared plan-file wire format."""
        return "".join(f"{a.name}\n" for a in self.actions)


@dataclass(frozen=True)
class StripsTask:
    """A resolved planning task; the ASTs it was built from ride along."""

    domain: DomainAst
    problem: ProblemAst
    predicates: Mapping[str, PredicateDecl]
    objects: Mapping[str, str]
    schemas: tuple[SchemaAst, ...]
    schema_by_name: Mapping[str, SchemaAst]
    init: frozenset[Atom]
    goal: frozenset[Atom]
    parents: Mapping[str, str]

    def is_subtype(self, t1: str, t2: str) -> bool:
        return is_subtype(t1, t2, self.parents)

    def objects_of_type(self, type_name: str) -> tuple[str, ...]:
        return tuple(
            o
            for o in sorted(self.objects)
            if is_subtype(self.objects[o], type_name, self.parents)
        )


def build_task(dom: DomainAst, prob: ProblemAst) -> StripsTask:
    """Resolve a domain/problem pair into a task, re-checking the atoms.

    The ASTs may come from the parser or be constructed programmatically
    (e.g. by pruning), so object declarations and init/goal atoms are
    validated here regardless of origin.
    """
    if dom.name != prob.domain_name:
        raise MissingDomain(prob.domain_name, dom.name)
    parents = build_parent_map(dom.types)
    objects: dict[str, str] = {}
    for name, tname in prob.objects:
        if tname not in parents:
            raise UnknownObjectType(name, tname)
        if name in objects:
            raise TaskTypeError(f"duplicate object '{name}'")
        objects[name] = tname
    predicates = dom.predicate_map()
    for atom in prob.init:
        check_ground_atom(atom, predicates, objects, parents)
    for atom in prob.goal:
        check_ground_atom(atom, predicates, objects, parents)
    return StripsTask(
        domain=dom,
        problem=prob,
        predicates=predicates,
        objects=objects,
        schemas=dom.schemas,
        schema_by_name={s.name: s for s in dom.schemas},
        init=frozenset(prob.init),
        goal=frozenset(prob.goal),
        parents=parents,
    )


# ── Grounding one schema ─────────────────────────────────────────────────────


def satisfies_equalities(schema: SchemaAst, binding: Mapping[str, str]) -> bool:
    for eq in schema.equalities:
        same = binding[eq.left] == binding[eq.right]
        if eq.negated == same:
            return False
    return True


def binding_is_type_correct(
    schema: SchemaAst, binding: Mapping[str, str], task: StripsTask
) -> bool:
    for var, tname in schema.parameters:
        obj_type = task.objects.get(binding.get(var, ""))
        if obj_type is None or not task.is_subtype(obj_type, tname):
            return False
    return True


def ground_schema(schema: SchemaAst, binding: Mapping[str, str]) -> GroundAction:
    """Substitute a complete binding into a schema."""

    def subst(atoms: tuple[Atom, ...]) -> frozenset[Atom]:
        return frozenset(
            Atom(a.predicate, tuple(binding[arg] for arg in a.args)) for a in atoms
        )

    return GroundAction(
        schema=schema.name,
        binding=tuple(binding[v] for v in schema.param_names),
        pre=subst(schema.precondition),
        add=subst(schema.add_effects),
        delete=subst(schema.del_effects),
        cost=schema.cost,
    )


# ── Transition semantics ─────────────────────────────────────────────────────


def is_applicable(state: frozenset[Atom], action: GroundAction) -> bool:
    return action.pre <= state


def apply_action(state: frozenset[Atom], action: GroundAction) -> frozenset[Atom]:
    if not is_applicable(state, action):
        raise NotApplicable(action.name)
    return (state - action.delete) | action.add


def apply_plan(
    state: frozenset[Atom], plan: Plan | Iterable[GroundAction]
) -> frozenset[Atom]:
    for i, action in enumerate(plan):
        if not is_applicable(state, action):
            raise NotApplicableAt(i, action.name)
        state = (state - action.delete) | action.add
    return state


def plan_cost(plan: Plan | Iterable[GroundAction]) -> Fraction:
    return sum((a.cost for a in plan), Fraction(0))


__all__ = [
    "Atom",
    "GroundAtom",
    "GroundAction",
    "Plan",
    "State",
    "StripsTask",
    "MissingDomain",
    "NotApplicable",
    "NotApplicableAt",
    "ROOT_TYPE",
    "build_task",
    "is_subtype",
    "is_applicable",
    "apply_action",
    "apply_plan",
    "plan_cost",
    "ground_schema",
    "satisfies_equalities",
    "binding_is_type_correct",
]
