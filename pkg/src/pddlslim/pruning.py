"""Remove objects, predicates, and schemas from a task before grounding.

A `PruningProposal` only ever names things to delete; applying one can
therefore shrink the grounded task but never grow it. Symbols that appear in
the goal are protected: the goal itself is copied verbatim, so removing
anything it mentions is rejected outright.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .model import StripsTask
from .pddl import Atom, DomainAst, PddlError, ProblemAst, SchemaAst, is_subtype


class UnknownSymbol(PddlError):
    def __init__(self, kind: str, name: str) -> None:
        super().__init__(f"proposal removes unknown {kind} '{name}'")
        self.kind = kind
        self.name = name


class GoalViolation(PddlError):
    def __init__(self, kind: str, name: str) -> None:
        super().__init__(
            f"proposal removes {kind} '{name}', which the goal mentions"
        )
        self.kind = kind
        self.name = name


class DanglingReference(PddlError):
    def __init__(self, schema: str, predicate: str) -> None:
        super().__init__(
            f"action '{schema}' references removed predicate '{predicate}'"
        )
        self.schema = schema
        self.predicate = predicate


@dataclass(frozen=True)
class PruningProposal:
    removed_objects: frozenset[str] = frozenset()
    removed_predicates: frozenset[str] = frozenset()
    removed_schemas: frozenset[str] = frozenset()

    @property
    def empty(self) -> bool:
        return not (
            self.removed_objects or self.removed_predicates or self.removed_schemas
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "removed_objects": sorted(self.removed_objects),
                "removed_predicates": sorted(self.removed_predicates),
                "removed_schemas": sorted(self.removed_schemas),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PruningProposal":
        data = json.loads(text)
        return cls(
            removed_objects=frozenset(data.get("removed_objects", ())),
            removed_predicates=frozenset(data.get("removed_predicates", ())),
            removed_schemas=frozenset(data.get("removed_schemas", ())),
        )


def goal_protected_symbols(task: StripsTask) -> tuple[frozenset[str], frozenset[str]]:
    """Objects and predicates the goal mentions; these must survive pruning."""
    objects: set[str] = set()
    predicates: set[str] = set()
    for atom in task.goal:
        predicates.add(atom.predicate)
        objects.update(atom.args)
    return frozenset(objects), frozenset(predicates)


def _schema_predicates(schema: SchemaAst) -> set[str]:
    atoms = schema.precondition + schema.add_effects + schema.del_effects
    return {a.predicate for a in atoms}


def apply_proposal(
    task: StripsTask, proposal: PruningProposal
) -> tuple[DomainAst, ProblemAst]:
    """Carry out a proposal, or reject it whole.

    Rejection, not cascading: if a kept schema still uses a removed
    predicate, that is an error in the proposal rather than an invitation to
    remove the schema too.
    """
    dom, prob = task.domain, task.problem
    schema_names = {s.name for s in dom.schemas}
    for name in proposal.removed_schemas:
        if name not in schema_names:
            raise UnknownSymbol("schema", name)
    predicate_names = set(task.predicates)
    for name in proposal.removed_predicates:
        if name not in predicate_names:
            raise UnknownSymbol("predicate", name)
    for name in proposal.removed_objects:
        if name not in task.objects:
            raise UnknownSymbol("object", name)

    goal_objects, goal_predicates = goal_protected_symbols(task)
    for name in sorted(proposal.removed_predicates & goal_predicates):
        raise GoalViolation("predicate", name)
    for name in sorted(proposal.removed_objects & goal_objects):
        raise GoalViolation("object", name)

    kept_schemas = tuple(
        s for s in dom.schemas if s.name not in proposal.removed_schemas
    )
    for schema in kept_schemas:
        used = _schema_predicates(schema)
        for predicate in sorted(used & proposal.removed_predicates):
            raise DanglingReference(schema.name, predicate)

    def keeps(atom: Atom) -> bool:
        if atom.predicate in proposal.removed_predicates:
            return False
        return not any(arg in proposal.removed_objects for arg in atom.args)

    new_dom = dataclasses.replace(
        dom,
        predicates=tuple(
            d for d in dom.predicates if d.name not in proposal.removed_predicates
        ),
        schemas=kept_schemas,
    )
    new_prob = dataclasses.replace(
        prob,
        objects=tuple(
            (o, t) for o, t in prob.objects if o not in proposal.removed_objects
        ),
        init=tuple(a for a in prob.init if keeps(a)),
        goal=prob.goal,
    )
    return new_dom, new_prob


def relevance_prune(task: StripsTask) -> PruningProposal:
    """Deterministic relevance analysis, the non-LLM stand-in backend.

    Backward fixpoint from the goal predicates: a schema is relevant as soon
    as one of its add effects mentions a relevant predicate, and relevant
    schemas pull their precondition predicates into the relevant set. This is
    deliberately syntactic; it keeps anything that merely looks load-bearing.
    """
    relevant: set[str] = {a.predicate for a in task.goal}
    relevant_schemas: set[str] = set()
    while True:
        grew = False
        for schema in task.schemas:
            if schema.name in relevant_schemas:
                continue
            if any(a.predicate in relevant for a in schema.add_effects):
                relevant_schemas.add(schema.name)
                relevant.update(a.predicate for a in schema.precondition)
                grew = True
        if not grew:
            break

    removed_schemas = {
        s.name for s in task.schemas if s.name not in relevant_schemas
    }
    kept = [s for s in task.schemas if s.name in relevant_schemas]
    used_by_kept: set[str] = set()
    for schema in kept:
        used_by_kept |= _schema_predicates(schema)
    removed_predicates = {
        p for p in task.predicates if p not in relevant and p not in used_by_kept
    }

    goal_objects, _ = goal_protected_symbols(task)
    removed_objects: set[str] = set()
    kept_param_types = {t for s in kept for _, t in s.parameters}
    for obj, obj_type in task.objects.items():
        if obj in goal_objects:
            continue
        compatible = any(
            is_subtype(obj_type, t, task.parents) for t in kept_param_types
        )
        if not compatible:
            removed_objects.add(obj)
    return PruningProposal(
        removed_objects=frozenset(removed_objects),
        removed_predicates=frozenset(removed_predicates),
        removed_schemas=frozenset(removed_schemas),
    )
