"""Decide whether a pruned task can stand in for the original.

Three independent levels:

* syntactic — both texts parse and type-check under the supported subset;
* semantic — the pruned task relates to the original purely by removal
  (P'⊆P, A'⊆A, O'⊆O, s0'⊆s0) and leaves the goal intact (G'≡G);
* computational — the pruned task grounds and solves within a time bound.

All three passing is a proxy, not a proof, which is why `validate_plan`
exists: it replays a plan step by step against the original task and is the
final word on soundness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import pddl
from .grounding import ResourceExceeded, ground
from .model import (
    Plan,
    StripsTask,
    build_task,
    ground_schema,
    satisfies_equalities,
)
from .pddl import Atom, PddlError, SchemaAst
from .search import (
    DEFAULT_TIME_BOUND,
    SearchOutcome,
    SearchResult,
    solve,
)

SEMANTIC_RELATIONS = ("predicates", "schemas", "objects", "init", "goal")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    symbol: str | None = None

    def __str__(self) -> str:
        return self.message


@dataclass
class LevelReport:
    name: str
    passed: bool
    diagnostics: list[Diagnostic] = field(default_factory=list)
    relations: dict[str, bool] | None = None
    search: SearchResult | None = None


@dataclass
class ValidationReport:
    syntactic: LevelReport | None = None
    semantic: LevelReport | None = None
    computational: LevelReport | None = None

    @property
    def levels(self) -> list[LevelReport]:
        return [
            lv
            for lv in (self.syntactic, self.semantic, self.computational)
            if lv is not None
        ]

    @property
    def passed(self) -> bool:
        ran = self.levels
        return len(ran) == 3 and all(lv.passed for lv in ran)

    def to_text(self) -> str:
        lines = []
        for lv in self.levels:
            status = "pass" if lv.passed else "FAIL"
            lines.append(f"{lv.name}: {status}")
            for d in lv.diagnostics:
                lines.append(f"  - {d.message}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        def level(lv: LevelReport | None) -> dict | None:
            if lv is None:
                return None
            out: dict = {
                "passed": lv.passed,
                "diagnostics": [
                    {"code": d.code, "message": d.message, "symbol": d.symbol}
                    for d in lv.diagnostics
                ],
            }
            if lv.relations is not None:
                out["relations"] = dict(lv.relations)
            if lv.search is not None:
                out["search"] = {
                    "outcome": lv.search.outcome.value,
                    "solving_time": lv.search.solving_time,
                }
            return out

        return {
            "syntactic": level(self.syntactic),
            "semantic": level(self.semantic),
            "computational": level(self.computational),
            "passed": self.passed,
        }

    def failure_text(self) -> str:
        """Every failed check on its own line, for repair prompting."""
        lines = []
        for lv in self.levels:
            if lv.passed:
                continue
            for d in lv.diagnostics:
                lines.append(f"{lv.name}: {d.message}")
            if not lv.diagnostics:
                lines.append(f"{lv.name}: failed")
        return "\n".join(lines)


# ── Level 1: syntactic ───────────────────────────────────────────────────────


def _try_parse_pair(
    domain_text: str, problem_text: str
) -> tuple[LevelReport, StripsTask | None]:
    diagnostics: list[Diagnostic] = []
    task = None
    try:
        dom = pddl.parse_domain(domain_text)
        prob = pddl.parse_problem(problem_text, dom)
        task = build_task(dom, prob)
    except PddlError as exc:
        diagnostics.append(Diagnostic("parse-error", str(exc)))
    report = LevelReport("syntactic", passed=not diagnostics, diagnostics=diagnostics)
    return report, task


def validate_syntactic(domain_text: str, problem_text: str) -> LevelReport:
    """Both texts must parse and type-check; nothing else is consulted."""
    report, _ = _try_parse_pair(domain_text, problem_text)
    return report


# ── Level 2: semantic ────────────────────────────────────────────────────────


def _normalize_schema(schema: SchemaAst):
    rename = {v: f"?v{i}" for i, v in enumerate(schema.param_names)}

    def atoms(group: tuple[Atom, ...]) -> frozenset[Atom]:
        return frozenset(
            Atom(a.predicate, tuple(rename[x] for x in a.args)) for a in group
        )

    eqs = frozenset(
        (min(rename[e.left], rename[e.right]),
         max(rename[e.left], rename[e.right]),
         e.negated)
        for e in schema.equalities
    )
    return (
        schema.name,
        tuple(t for _, t in schema.parameters),
        atoms(schema.precondition),
        eqs,
        atoms(schema.add_effects),
        atoms(schema.del_effects),
        schema.cost,
    )


def validate_semantic(pruned: StripsTask, original: StripsTask) -> LevelReport:
    """Check that `pruned` is the original minus removals, goal intact."""
    diagnostics: list[Diagnostic] = []
    relations = {name: True for name in SEMANTIC_RELATIONS}

    def fail(relation: str, code: str, message: str, symbol: str) -> None:
        relations[relation] = False
        diagnostics.append(Diagnostic(code, message, symbol))

    original_preds = {
        p.name: (p.name, p.param_types) for p in original.domain.predicates
    }
    for p in pruned.domain.predicates:
        want = original_preds.get(p.name)
        if want is None:
            fail(
                "predicates",
                "new-predicate",
                f"predicate '{p.name}' is not declared in the original domain",
                p.name,
            )
        elif want != (p.name, p.param_types):
            fail(
                "predicates",
                "changed-predicate",
                f"predicate '{p.name}' differs from the original declaration",
                p.name,
            )

    original_schemas = {s.name: _normalize_schema(s) for s in original.schemas}
    for s in pruned.schemas:
        want = original_schemas.get(s.name)
        if want is None:
            fail(
                "schemas",
                "new-schema",
                f"action '{s.name}' is not declared in the original domain",
                s.name,
            )
        elif want != _normalize_schema(s):
            fail(
                "schemas",
                "changed-schema",
                f"action '{s.name}' is structurally different from the original",
                s.name,
            )

    for obj, obj_type in sorted(pruned.objects.items()):
        want = original.objects.get(obj)
        if want is None:
            fail(
                "objects",
                "new-object",
                f"object '{obj}' is not declared in the original problem",
                obj,
            )
        elif want != obj_type:
            fail(
                "objects",
                "retyped-object",
                f"object '{obj}' changed type from '{want}' to '{obj_type}'",
                obj,
            )

    for atom in sorted(pruned.init - original.init):
        fail(
            "init",
            "new-init-atom",
            f"init atom {atom} does not appear in the original init",
            atom.predicate,
        )

    for atom in sorted(original.goal - pruned.goal):
        fail("goal", "missing-goal-atom", f"goal atom {atom} was dropped",
             atom.predicate)
    for atom in sorted(pruned.goal - original.goal):
        fail("goal", "new-goal-atom", f"goal atom {atom} was added",
             atom.predicate)

    return LevelReport(
        "semantic",
        passed=all(relations.values()),
        diagnostics=diagnostics,
        relations=relations,
    )


# ── Level 3: computational ───────────────────────────────────────────────────

Solver = Callable[..., SearchResult]


def validate_computational(
    task: StripsTask,
    time_bound: float = DEFAULT_TIME_BOUND,
    solver: Solver | None = None,
    max_actions: int | None = None,
) -> LevelReport:
    """The task must ground and solve within the bound to pass."""
    diagnostics: list[Diagnostic] = []
    result: SearchResult | None = None
    try:
        if max_actions is None:
            gt = ground(task)
        else:
            gt = ground(task, max_actions=max_actions)
        run = solver if solver is not None else solve
        result = run(gt, time_bound)
        if result.outcome is not SearchOutcome.SOLVED:
            diagnostics.append(
                Diagnostic(
                    "no-plan",
                    f"no plan found within the {time_bound:g}s bound: "
                    f"{result.outcome.value}",
                )
            )
    except ResourceExceeded as exc:
        diagnostics.append(Diagnostic("grounding-blowup", str(exc)))
    return LevelReport(
        "computational",
        passed=not diagnostics,
        diagnostics=diagnostics,
        search=result,
    )


# ── Plan replay against the original task ────────────────────────────────────


@dataclass(frozen=True)
class PlanVerdict:
    valid: bool
    step: int | None = None
    reason: str | None = None


PlanSteps = Sequence[tuple[str, tuple[str, ...]]]


def validate_plan(original: StripsTask, plan: Plan | PlanSteps) -> PlanVerdict:
    """Replay a plan on the original task, re-grounding every step.

    Steps are taken by name: each is bound afresh against the original
    schemas, so a plan found on a pruned task is judged only by what its
    action names and arguments mean in the original. Unknown names, bad
    arities, ill-typed bindings and unsatisfied preconditions are all
    invalidity verdicts, not exceptions.
    """
    steps = plan.steps() if isinstance(plan, Plan) else list(plan)
    state = original.init
    for i, (name, args) in enumerate(steps):
        schema = original.schema_by_name.get(name)
        if schema is None:
            return PlanVerdict(False, i, f"unknown action '{name}'")
        if len(args) != len(schema.parameters):
            return PlanVerdict(
                False,
                i,
                f"'{name}' takes {len(schema.parameters)} arguments, "
                f"got {len(args)}",
            )
        binding = dict(zip(schema.param_names, args))
        for var, tname in schema.parameters:
            obj_type = original.objects.get(binding[var])
            if obj_type is None:
                return PlanVerdict(
                    False, i, f"unknown object '{binding[var]}'"
                )
            if not original.is_subtype(obj_type, tname):
                return PlanVerdict(
                    False,
                    i,
                    f"object '{binding[var]}' is not of type '{tname}'",
                )
        if not satisfies_equalities(schema, binding):
            return PlanVerdict(False, i, "equality constraint violated")
        action = ground_schema(schema, binding)
        missing = action.pre - state
        if missing:
            atom = sorted(missing)[0]
            return PlanVerdict(
                False, i, f"precondition {atom} does not hold"
            )
        state = (state - action.delete) | action.add
    unmet = original.goal - state
    if unmet:
        atom = sorted(unmet)[0]
        return PlanVerdict(False, None, f"goal atom {atom} not reached")
    return PlanVerdict(True)


# ── Pipeline helper ──────────────────────────────────────────────────────────


def validate_pruned(
    original: StripsTask,
    domain_text: str,
    problem_text: str,
    time_bound: float = DEFAULT_TIME_BOUND,
    solver: Solver | None = None,
) -> ValidationReport:
    """Run all three levels on candidate texts, short-circuiting on parse."""
    report = ValidationReport()
    report.syntactic, task = _try_parse_pair(domain_text, problem_text)
    if task is None:
        return report
    report.semantic = validate_semantic(task, original)
    report.computational = validate_computational(
        task, time_bound=time_bound, solver=solver
    )
    return report


def make_validator(
    original: StripsTask,
    time_bound: float = DEFAULT_TIME_BOUND,
    solver: Solver | None = None,
) -> Callable[[str, str], ValidationReport]:
    def validator(domain_text: str, problem_text: str) -> ValidationReport:
        return validate_pruned(
            original, domain_text, problem_text, time_bound=time_bound, solver=solver
        )

    return validator
