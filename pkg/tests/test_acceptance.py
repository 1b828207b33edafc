"""Acceptance checks, one test per numbered criterion.

Each test prints a single `[acceptance] NN <tag>: PASS|FAIL` line; run with
`pytest tests/test_acceptance.py -v -s` to see them all. Every check either
carries its own independent oracle (the slow grounder below) or asserts a
hand-verifiable quantity stated next to the assertion.
"""

import itertools
import random
import time

import pytest

from pddlslim import build_task, parse_domain, parse_problem
from pddlslim.bench import BenchTask, run_benchmark
from pddlslim.generators import (
    FAMILIES,
    GeneratorSpec,
    corpus_specs,
    generate_instance,
    instance_name,
)
from pddlslim.grounding import ground
from pddlslim.llm import (
    LlmConfig,
    MockBackend,
    PromptTemplate,
    format_repair_prompt,
    spg_llm,
)
from pddlslim.model import apply_plan, ground_schema, satisfies_equalities
from pddlslim.pddl import print_domain, print_problem
from pddlslim.pruning import (
    PruningProposal,
    apply_proposal,
    goal_protected_symbols,
)
from pddlslim.search import INFINITY, SearchOutcome, h_add, solve
from pddlslim.validation import (
    SEMANTIC_RELATIONS,
    make_validator,
    validate_plan,
    validate_pruned,
)

from conftest import fixture_text, load_task


def _report(tag: str, problems: list[str]) -> None:
    print(f"[acceptance] {tag}: {'FAIL' if problems else 'PASS'}")
    assert not problems, "; ".join(problems[:10])


def _build(spec: GeneratorSpec):
    d, p = generate_instance(spec)
    dom = parse_domain(d)
    return build_task(dom, parse_problem(p, dom))


def small_specs(seeds: int) -> list[GeneratorSpec]:
    """Generated tasks with at most 10 objects each."""
    specs = []
    for seed in range(seeds):
        for blocks in (3, 4, 5):
            specs.append(GeneratorSpec("blocksworld4", {"blocks": blocks}, seed))
            specs.append(GeneratorSpec("blocksworld5", {"blocks": blocks}, seed))
        specs.append(
            GeneratorSpec(
                "zeno_like", {"cities": 2, "persons": 1, "fuel_levels": 2}, seed
            )
        )
        specs.append(
            GeneratorSpec(
                "zeno_like",
                {"cities": 3, "persons": 2, "fuel_levels": 3, "paint": 1},
                seed,
            )
        )
        specs.append(
            GeneratorSpec(
                "chain", {"length": 2 + seed, "distractors": seed % 3}, seed
            )
        )
    return specs


def reference_reachable_actions(task):
    """Independent oracle: instantiate everything, then saturate facts."""
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
            if key not in reachable and action.pre <= facts:
                reachable.add(key)
                facts |= action.add
                changed = True
    return reachable


def test_criterion_01_grounder_equals_oracle():
    specs = small_specs(6)
    assert len(specs) >= 50
    problems = []
    t0 = time.perf_counter()
    for spec in specs:
        task = _build(spec)
        assert len(task.objects) <= 10, instance_name(spec)
        mine = {(a.schema, a.binding) for a in ground(task).actions}
        want = reference_reachable_actions(task)
        if mine != want:
            problems.append(
                f"{instance_name(spec)}: grounder {len(mine)} vs oracle {len(want)}"
            )
    elapsed = time.perf_counter() - t0
    if elapsed >= 10.0:
        problems.append(f"corpus took {elapsed:.1f}s, budget is 10s")
    _report("01 grounder-oracle-equivalence", problems)


def test_criterion_02_blocksworld_counts():
    problems = []
    bw4 = load_task("bw4_domain.pddl", "bw4_prob.pddl")
    bw5 = load_task("bw5_domain.pddl", "bw5_prob.pddl")
    # 4 blocks: pick-up/put-down give 4 each, stack/unstack 4*3 each
    if ground(bw4).stats.num_actions != 32:
        problems.append(f"bw4 grounded to {ground(bw4).stats.num_actions}, not 32")
    # the block-to-block move adds another 4*3
    if ground(bw5).stats.num_actions != 44:
        problems.append(f"bw5 grounded to {ground(bw5).stats.num_actions}, not 44")
    proposal = PruningProposal(removed_schemas=frozenset({"move-b-to-b"}))
    new_dom, new_prob = apply_proposal(bw5, proposal)
    pruned = build_task(new_dom, new_prob)
    gt = ground(pruned)
    if gt.stats.num_actions != 32:
        problems.append(f"pruned bw5 grounded to {gt.stats.num_actions}, not 32")
    result = solve(gt, 30.0)
    if not result.solved:
        problems.append("pruned bw5 became unsolvable")
    elif not validate_plan(bw5, result.plan).valid:
        problems.append("pruned bw5 plan does not replay on the original")
    _report("02 blocksworld-count-check", problems)


def test_criterion_03_pruning_monotonicity():
    tasks = [
        load_task("bw5_domain.pddl", "bw5_prob.pddl"),
        load_task("zeno_domain.pddl", "zeno_prob.pddl"),
        _build(GeneratorSpec("zeno_like", {"persons": 3, "paint": 1}, 5)),
        _build(GeneratorSpec("chain", {"length": 4, "distractors": 3}, 0)),
    ]
    rng = random.Random(2024)
    problems = []
    pairs = 0
    while pairs < 100:
        task = tasks[pairs % len(tasks)]
        goal_objects, goal_predicates = goal_protected_symbols(task)
        baseline = ground(task).stats.num_actions
        schemas = {s.name for s in task.schemas if rng.random() < 0.3}
        kept = [s for s in task.schemas if s.name not in schemas]
        used = {
            a.predicate
            for s in kept
            for a in s.precondition + s.add_effects + s.del_effects
        }
        predicates = {
            p
            for p in task.predicates
            if p not in used and p not in goal_predicates and rng.random() < 0.5
        }
        objects = {
            o for o in task.objects if o not in goal_objects and rng.random() < 0.2
        }
        proposal = PruningProposal(
            removed_objects=frozenset(objects),
            removed_predicates=frozenset(predicates),
            removed_schemas=frozenset(schemas),
        )
        new_dom, new_prob = apply_proposal(task, proposal)
        count = ground(build_task(new_dom, new_prob)).stats.num_actions
        if count > baseline:
            problems.append(f"pair {pairs}: {count} > baseline {baseline}")
        pairs += 1
    _report("03 pruning-monotonicity-100-pairs", problems)


def test_criterion_04_rule_pipeline_soundness_sweep():
    specs = corpus_specs(FAMILIES, 25)
    assert len(specs) >= 100
    tasks = []
    for spec in specs:
        d, p = generate_instance(spec)
        tasks.append(BenchTask(instance_name(spec), d, p))
    records = run_benchmark(tasks, methods=("SPG-rule",), time_bound=60.0)
    problems = []
    for r in records:
        if not r.detail.startswith("accepted"):
            problems.append(f"{r.task}: not accepted ({r.detail})")
        elif r.sound != "valid":
            problems.append(f"{r.task}: {r.sound} ({r.detail})")
    _report(f"04 rule-backend-soundness-{len(records)}-tasks", problems)


def test_criterion_05_identity_backend_equivalence():
    specs = corpus_specs(FAMILIES, 3)
    tasks = []
    for spec in specs:
        d, p = generate_instance(spec)
        tasks.append(BenchTask(instance_name(spec), d, p))
    records = run_benchmark(
        tasks, methods=("FG", "SPG-llm"), llm_config=LlmConfig(backend="mock")
    )
    by = {(r.task, r.method): r for r in records}
    problems = []
    for t in tasks:
        fg = by[(t.task_id, "FG")]
        llm = by[(t.task_id, "SPG-llm")]
        if fg.grounded_actions != llm.grounded_actions:
            problems.append(
                f"{t.task_id}: actions {llm.grounded_actions} != {fg.grounded_actions}"
            )
        if fg.plan_cost != llm.plan_cost:
            problems.append(
                f"{t.task_id}: cost {llm.plan_cost} != {fg.plan_cost}"
            )
        if not (fg.sound == llm.sound == "valid"):
            problems.append(f"{t.task_id}: sound {fg.sound}/{llm.sound}")
    _report("05 identity-backend-equivalence", problems)


def test_criterion_06_loop_contract():
    d = fixture_text("bw4_domain.pddl")
    p = fixture_text("bw4_prob.pddl")
    original = load_task("bw4_domain.pddl", "bw4_prob.pddl")
    validator = make_validator(original, time_bound=30.0)
    good = d + "\n" + p
    bad = "no task files in this reply"
    problems = []
    for k in (1, 2, 3):
        config = LlmConfig(backend="mock", max_attempts=k)
        backend = MockBackend([bad] * (k - 1) + [good])
        outcome = spg_llm(d, p, PromptTemplate(), config, validator, backend)
        if not (outcome.accepted and backend.calls == k == len(outcome.attempts)):
            problems.append(
                f"K={k} accept path: status {outcome.status}, "
                f"{backend.calls} calls, {len(outcome.attempts)} attempts"
            )
        backend = MockBackend([bad] * k)
        outcome = spg_llm(d, p, PromptTemplate(), config, validator, backend)
        if not (
            not outcome.accepted
            and backend.calls == k == len(outcome.attempts)
            and outcome.domain_text is None
            and outcome.problem_text is None
        ):
            problems.append(
                f"K={k} reject path: status {outcome.status}, "
                f"{backend.calls} calls, texts {outcome.domain_text!r}"
            )
    _report("06 propose-validate-loop-contract", problems)


def test_criterion_07_zeno_pruning_demonstration():
    spec = GeneratorSpec(
        "zeno_like",
        {"cities": 3, "persons": 4, "goal_persons": 2, "fuel_levels": 3},
        11,
    )
    d, p = generate_instance(spec)
    dom = parse_domain(d)
    original = build_task(dom, parse_problem(p, dom))
    assert "zoom" in original.schema_by_name
    goal_objects, _ = goal_protected_symbols(original)
    surplus = {"p3", "p4"} - goal_objects
    assert surplus == {"p3", "p4"}, "expected two surplus persons"

    proposal = PruningProposal(
        removed_objects=frozenset(surplus),
        removed_schemas=frozenset({"zoom"}),
    )
    new_dom, new_prob = apply_proposal(original, proposal)
    response = (
        "The extra passengers and the double-step flight are never needed.\n\n"
        "```pddl\n" + print_domain(new_dom) + "```\n\n"
        "```pddl\n" + print_problem(new_prob) + "```\n"
    )
    validator = make_validator(original, time_bound=60.0)
    outcome = spg_llm(
        d, p, PromptTemplate(), LlmConfig(backend="mock"), validator,
        MockBackend([response]),
    )
    problems = []
    if not outcome.accepted:
        problems.append(f"candidate rejected: {outcome.attempts[-1].report.failure_text()}")
        _report("07 zeno-pruning-demonstration", problems)
        return
    report = outcome.attempts[-1].report
    for level in report.levels:
        if not level.passed:
            problems.append(f"level {level.name} failed")
    pruned_dom = parse_domain(outcome.domain_text)
    pruned = build_task(pruned_dom, parse_problem(outcome.problem_text, pruned_dom))
    gt_original = ground(original)
    gt_pruned = ground(pruned)
    if not gt_pruned.stats.num_actions < gt_original.stats.num_actions:
        problems.append(
            f"no reduction: {gt_pruned.stats.num_actions} vs "
            f"{gt_original.stats.num_actions}"
        )
    result = solve(gt_pruned, 60.0)
    if not result.solved:
        problems.append("pruned task unsolved")
    else:
        verdict = validate_plan(original, result.plan)
        if not verdict.valid:
            problems.append(f"plan invalid on original: {verdict.reason}")
    _report("07 zeno-pruning-demonstration", problems)


def test_criterion_08_planner_properties():
    problems = []
    corpus = [_build(spec) for spec in small_specs(4)]
    corpus += [
        load_task("bw4_domain.pddl", "bw4_prob.pddl"),
        load_task("bw5_domain.pddl", "bw5_prob.pddl"),
        load_task("zeno_domain.pddl", "zeno_prob.pddl"),
        load_task("typed_domain.pddl", "typed_prob.pddl"),
    ]
    for i, task in enumerate(corpus):
        gt = ground(task)
        h0 = h_add(gt, gt.init)
        if (h0 == 0) != (gt.goal <= gt.init):
            problems.append(f"task {i}: h_add zero-iff-goal violated at init")
        result = solve(gt, 30.0)
        if not result.solved:
            problems.append(f"task {i}: corpus task unsolved ({result.outcome})")
            continue
        verdict = validate_plan(task, result.plan)
        if not verdict.valid:
            problems.append(f"task {i}: replay failed at {verdict.step}")
        final = apply_plan(gt.init, result.plan)
        if h_add(gt, final) != 0:
            problems.append(f"task {i}: h_add nonzero on a goal state")

    # h_add = infinity must surface as UNSOLVABLE
    dom = parse_domain(fixture_text("bw4_domain.pddl"))
    stuck = build_task(
        dom,
        parse_problem(
            "(define (problem stuck) (:domain blocksworld4)"
            " (:objects b1 b2) (:init (on b1 b2) (on b2 b1))"
            " (:goal (and (ontable b1))))",
            dom,
        ),
    )
    zdom = parse_domain(fixture_text("zeno_domain.pddl"))
    stranded = build_task(
        zdom,
        parse_problem(
            "(define (problem stranded) (:domain zeno-mini)"
            " (:objects a1 - aircraft p1 - person c1 c2 - city f0 - flevel)"
            " (:init (at-aircraft a1 c1) (fuel-level a1 f0) (at-person p1 c1))"
            " (:goal (at-person p1 c2)))",
            zdom,
        ),
    )
    for name, task in (("stuck", stuck), ("stranded", stranded)):
        gt = ground(task)
        if h_add(gt, gt.init) != INFINITY:
            problems.append(f"{name}: expected infinite h_add")
        if solve(gt, 30.0).outcome is not SearchOutcome.UNSOLVABLE:
            problems.append(f"{name}: expected UNSOLVABLE")
    _report("08 planner-properties", problems)


def test_criterion_09_parser_round_trip():
    pairs = [
        (fixture_text("bw4_domain.pddl"), fixture_text("bw4_prob.pddl")),
        (fixture_text("bw5_domain.pddl"), fixture_text("bw5_prob.pddl")),
        (fixture_text("zeno_domain.pddl"), fixture_text("zeno_prob.pddl")),
        (fixture_text("typed_domain.pddl"), fixture_text("typed_prob.pddl")),
    ]
    pairs += [generate_instance(spec) for spec in corpus_specs(FAMILIES, 3)]
    problems = []
    for i, (d, p) in enumerate(pairs):
        dom = parse_domain(d)
        prob = parse_problem(p, dom)
        cd, cp = print_domain(dom), print_problem(prob)
        dom2 = parse_domain(cd)
        prob2 = parse_problem(cp, dom2)
        if (dom2, prob2) != (dom, prob):
            problems.append(f"pair {i}: reparse changed the tree")
        if (print_domain(dom2), print_problem(prob2)) != (cd, cp):
            problems.append(f"pair {i}: canonical text is not a fixpoint")
    _report(f"09 parser-round-trip-{len(pairs)}-pairs", problems)


def test_criterion_10_semantic_negative_paths():
    d = fixture_text("zeno_domain.pddl")
    p = fixture_text("zeno_prob.pddl")
    dom = parse_domain(d)
    original = build_task(dom, parse_problem(p, dom))
    breaks = {
        "predicates": (
            d.replace(
                "(painted ?a - aircraft))",
                "(painted ?a - aircraft)\n               (sparkly ?a - aircraft))",
            ),
            p,
            "sparkly",
        ),
        "schemas": (
            d.replace(
                ":precondition (and (at-aircraft ?a ?c) (fuel-level ?a ?l1)"
                " (next ?l1 ?l2))",
                ":precondition (and (fuel-level ?a ?l1) (next ?l1 ?l2))",
            ),
            p,
            "refuel",
        ),
        "objects": (d, p.replace("c1 c2 c3 - city", "c1 c2 c3 c9 - city"), "c9"),
        "init": (
            d,
            p.replace("(at-person p2 c2)", "(at-person p2 c2) (at-person p2 c3)"),
            "at-person",
        ),
        "goal": (d, p.replace("(at-person p2 c3)", "(painted a1)"), "at-person"),
    }
    assert set(breaks) == set(SEMANTIC_RELATIONS)
    problems = []
    for relation, (bd, bp, symbol) in breaks.items():
        assert (bd, bp) != (d, p), f"{relation}: surgery did not apply"
        report = validate_pruned(original, bd, bp, time_bound=30.0)
        if report.passed or report.semantic is None:
            problems.append(f"{relation}: candidate was not rejected semantically")
            continue
        relations = report.semantic.relations
        wrong = {r for r, ok in relations.items() if not ok}
        if wrong != {relation}:
            problems.append(f"{relation}: failed relations {sorted(wrong)}")
        prompt = format_repair_prompt(PromptTemplate(), d, p, bd, bp, report)
        if symbol not in prompt:
            problems.append(f"{relation}: repair prompt does not name '{symbol}'")
    _report("10 semantic-negative-paths", problems)
