"""Command-line front end.

Exit codes: 0 on success, 1 when the task itself fails (no plan, rejected
pruning, failed validation), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pddl
from .bench import (
    BenchTask,
    METHODS,
    METRICS,
    emit_csv,
    emit_scatter,
    run_benchmark,
)
from .generators import (
    FAMILIES,
    GeneratorSpec,
    corpus_specs,
    generate_instance,
    instance_name,
)
from .grounding import DEFAULT_MAX_ACTIONS, dump_ground_task, ground
from .llm import (
    HttpBackend,
    LlmConfig,
    PromptTemplate,
    extract_task_files,
    format_prompt,
    spg_llm,
)
from .model import build_task
from .pddl import PddlError, format_number, print_domain, print_problem
from .pruning import apply_proposal, relevance_prune
from .search import (
    DEFAULT_MAX_CLOSED,
    DEFAULT_TIME_BOUND,
    ExternalPlanner,
    SearchOutcome,
    solve,
    solve_with_external,
)
from .validation import make_validator, validate_pruned


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_task(domain_path: str, problem_path: str):
    dom = pddl.parse_domain(_read(domain_path))
    prob = pddl.parse_problem(_read(problem_path), dom)
    return build_task(dom, prob)


def _template(args) -> PromptTemplate:
    if getattr(args, "template", None):
        return PromptTemplate.from_file(args.template)
    return PromptTemplate()


def _llm_config(args, backend: str) -> LlmConfig:
    return LlmConfig(
        backend=backend,
        endpoint=getattr(args, "endpoint", "") or "",
        model=getattr(args, "model", "") or "",
        max_attempts=getattr(args, "attempts", 1),
        repair_prompting=not getattr(args, "resample", False),
    )


def _solver(args):
    cmd = getattr(args, "external_planner", None)
    if not cmd:
        return None
    planner = ExternalPlanner(cmd)

    def run(gt, time_bound):
        return solve_with_external(gt, planner, time_bound)

    return run


# ── Subcommands ──────────────────────────────────────────────────────────────


def _cmd_parse(args) -> int:
    task = _load_task(args.domain, args.problem)
    if args.canonical:
        sys.stdout.write(print_domain(task.domain))
        sys.stdout.write(print_problem(task.problem))
        return 0
    dom, prob = task.domain, task.problem
    print(
        f"domain {dom.name}: {len(dom.types)} types, "
        f"{len(dom.predicates)} predicates, {len(dom.schemas)} schemas"
    )
    print(
        f"problem {prob.name}: {len(prob.objects)} objects, "
        f"{len(prob.init)} init atoms, {len(prob.goal)} goal atoms"
    )
    return 0


def _cmd_ground(args) -> int:
    task = _load_task(args.domain, args.problem)
    gt = ground(task, max_actions=args.max_actions)
    print(f"actions: {gt.stats.num_actions}")
    print(f"atoms: {gt.stats.num_atoms}")
    print(f"grounding-time: {gt.stats.grounding_time:.6f}")
    print(f"goal-reachable: {'yes' if gt.goal_reachable else 'no'}")
    if args.dump == "-":
        sys.stdout.write(dump_ground_task(gt))
    elif args.dump:
        Path(args.dump).write_text(dump_ground_task(gt), encoding="utf-8")
    return 0


def _cmd_solve(args) -> int:
    task = _load_task(args.domain, args.problem)
    gt = ground(task, max_actions=args.max_actions)
    solver = _solver(args)
    if solver is not None:
        result = solver(gt, args.time_bound)
    else:
        result = solve(gt, args.time_bound, max_closed=args.max_closed)
    print(f"outcome: {result.outcome.value}")
    print(f"solving-time: {result.solving_time:.6f}")
    if not result.solved:
        return 1
    print(f"cost: {format_number(result.cost)}")
    print(f"length: {len(result.plan)}")
    sys.stdout.write(result.plan.to_text())
    if args.plan_out:
        Path(args.plan_out).write_text(result.plan.to_text(), encoding="utf-8")
    return 0


def _emit_pair(args, domain_text: str, problem_text: str, extra=None) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "domain.pddl").write_text(domain_text, encoding="utf-8")
        (out / "problem.pddl").write_text(problem_text, encoding="utf-8")
        for name, text in (extra or {}).items():
            (out / name).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(domain_text)
        sys.stdout.write("\n")
        sys.stdout.write(problem_text)


def _cmd_prune(args) -> int:
    domain_text = _read(args.domain)
    problem_text = _read(args.problem)
    if args.backend == "rule":
        task = _load_task(args.domain, args.problem)
        proposal = relevance_prune(task)
        new_dom, new_prob = apply_proposal(task, proposal)
        _emit_pair(
            args,
            print_domain(new_dom),
            print_problem(new_prob),
            {"proposal.json": proposal.to_json() + "\n"},
        )
        return 0
    if args.backend == "mock":
        _emit_pair(args, domain_text, problem_text)
        return 0
    config = _llm_config(args, "http")
    prompt = format_prompt(_template(args), domain_text, problem_text)
    response = HttpBackend(config).complete(prompt)
    new_domain, new_problem = extract_task_files(response)
    _emit_pair(args, new_domain + "\n", new_problem + "\n")
    return 0


def _cmd_validate(args) -> int:
    original = _load_task(args.domain, args.problem)
    report = validate_pruned(
        original,
        _read(args.pruned_domain),
        _read(args.pruned_problem),
        time_bound=args.time_bound,
        solver=_solver(args),
    )
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        sys.stdout.write(report.to_text())
    return 0 if report.passed else 1


def _cmd_spg(args) -> int:
    domain_text = _read(args.domain)
    problem_text = _read(args.problem)
    original = _load_task(args.domain, args.problem)
    config = _llm_config(args, args.backend)
    validator = make_validator(
        original, time_bound=args.time_bound, solver=_solver(args)
    )
    outcome = spg_llm(domain_text, problem_text, _template(args), config, validator)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, attempt in enumerate(outcome.attempts, 1):
            (out / f"attempt_{i:02d}_prompt.txt").write_text(
                attempt.prompt, encoding="utf-8"
            )
            if attempt.response is not None:
                (out / f"attempt_{i:02d}_response.txt").write_text(
                    attempt.response, encoding="utf-8"
                )
            (out / f"attempt_{i:02d}_report.txt").write_text(
                attempt.report.to_text(), encoding="utf-8"
            )
        if outcome.accepted:
            (out / "domain.pddl").write_text(
                outcome.domain_text, encoding="utf-8"
            )
            (out / "problem.pddl").write_text(
                outcome.problem_text, encoding="utf-8"
            )
    print(f"status: {outcome.status} after {len(outcome.attempts)} attempt(s)")
    if outcome.accepted and not args.out:
        sys.stdout.write(outcome.domain_text)
        sys.stdout.write("\n")
        sys.stdout.write(outcome.problem_text)
    return 0 if outcome.accepted else 1


def _cmd_bench(args) -> int:
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    specs = corpus_specs(families, args.count, args.seed)
    tasks = []
    for spec in specs:
        domain_text, problem_text = generate_instance(spec)
        tasks.append(BenchTask(instance_name(spec), domain_text, problem_text))
    config = _llm_config(args, args.backend)
    records = run_benchmark(
        tasks,
        methods,
        time_bound=args.time_bound,
        llm_config=config,
        template=_template(args),
        jobs=args.jobs,
        max_actions=args.max_actions,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(emit_csv(records), encoding="utf-8")
    for metric in METRICS:
        (out / f"scatter_{metric}.csv").write_text(
            emit_scatter(records, metric), encoding="utf-8"
        )
    run_config = {
        "families": families,
        "count": args.count,
        "seed": args.seed,
        "methods": methods,
        "time_bound": args.time_bound,
        "attempts": args.attempts,
        "backend": args.backend,
        "jobs": args.jobs,
        "max_actions": args.max_actions,
    }
    (out / "run_config.json").write_text(
        json.dumps(run_config, indent=2) + "\n", encoding="utf-8"
    )
    if not args.no_figures:
        from .figures import render_all

        render_all(records, out)
    for method in methods:
        mine = [r for r in records if r.method == method]
        valid = sum(1 for r in mine if r.sound == "valid")
        invalid = sum(1 for r in mine if r.sound == "invalid")
        unsolved = sum(1 for r in mine if r.sound == "unsolved")
        print(
            f"{method}: {valid} valid, {invalid} invalid, "
            f"{unsolved} unsolved (of {len(mine)})"
        )
    print(f"wrote {out / 'records.csv'}")
    return 0


def _cmd_gen(args) -> int:
    size: dict[str, int] = {}
    for item in args.size or ():
        if "=" not in item:
            raise PddlError(f"--size expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            size[key.strip()] = int(value)
        except ValueError as exc:
            raise PddlError(f"--size {item!r}: {exc}") from exc
    spec = GeneratorSpec(args.family, size, args.seed)
    domain_text, problem_text = generate_instance(spec)
    _emit_pair(args, domain_text, problem_text)
    return 0


# ── Argument wiring ──────────────────────────────────────────────────────────


def _add_time_bound(sp) -> None:
    sp.add_argument(
        "--time-bound",
        type=float,
        default=DEFAULT_TIME_BOUND,
        help="seconds allowed per solver call (default %(default)s)",
    )


def _add_llm_flags(sp) -> None:
    sp.add_argument("--endpoint", default="", help="chat-completions URL")
    sp.add_argument("--model", default="", help="model name sent to the endpoint")
    sp.add_argument("--template", default="", help="prompt template file")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pddlslim",
        description="Prune, ground, solve, and benchmark STRIPS tasks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and type-check a task")
    sp.add_argument("domain")
    sp.add_argument("problem")
    sp.add_argument("--canonical", action="store_true",
                    help="print the canonical rendering instead of a summary")
    sp.set_defaults(func=_cmd_parse)

    sp = sub.add_parser("ground", help="ground a task by reachability")
    sp.add_argument("domain")
    sp.add_argument("problem")
    sp.add_argument("--max-actions", type=int, default=DEFAULT_MAX_ACTIONS)
    sp.add_argument("--dump", default="", help="write atoms/actions ('-' stdout)")
    sp.set_defaults(func=_cmd_ground)

    sp = sub.add_parser("solve", help="ground and search for a plan")
    sp.add_argument("domain")
    sp.add_argument("problem")
    _add_time_bound(sp)
    sp.add_argument("--max-actions", type=int, default=DEFAULT_MAX_ACTIONS)
    sp.add_argument("--max-closed", type=int, default=DEFAULT_MAX_CLOSED)
    sp.add_argument("--external-planner", default="",
                    help="command template with {domain} {problem} {plan}")
    sp.add_argument("--plan-out", default="", help="also write the plan here")
    sp.set_defaults(func=_cmd_solve)

    sp = sub.add_parser("prune", help="propose a slimmer task (single shot)")
    sp.add_argument("domain")
    sp.add_argument("problem")
    sp.add_argument("--backend", choices=("rule", "llm", "mock"), required=True)
    sp.add_argument("--out", default="", help="write files here instead of stdout")
    sp.add_argument("--attempts", type=int, default=1, help=argparse.SUPPRESS)
    _add_llm_flags(sp)
    sp.set_defaults(func=_cmd_prune)

    sp = sub.add_parser("validate", help="run the three validation levels")
    sp.add_argument("domain")
    sp.add_argument("problem")
    sp.add_argument("pruned_domain")
    sp.add_argument("pruned_problem")
    _add_time_bound(sp)
    sp.add_argument("--external-planner", default="")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("spg", help="full propose-validate-repair pipeline")
    sp.add_argument("domain")
    sp.add_argument("problem")
    sp.add_argument("--backend", choices=("http", "mock", "rule"), default="mock")
    sp.add_argument("--attempts", type=int, default=1, help="max attempts K")
    sp.add_argument("--resample", action="store_true",
                    help="retry with the original prompt instead of a repair prompt")
    _add_time_bound(sp)
    sp.add_argument("--external-planner", default="")
    sp.add_argument("--out", default="", help="transcript/output directory")
    _add_llm_flags(sp)
    sp.set_defaults(func=_cmd_spg)

    sp = sub.add_parser("bench", help="run methods over a generated corpus")
    sp.add_argument("--families", default=",".join(FAMILIES))
    sp.add_argument("--count", type=int, default=3, help="instances per family")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--methods", default=",".join(METHODS))
    sp.add_argument("--backend", choices=("http", "mock", "rule"), default="mock",
                    help="backend used by the SPG-llm method")
    sp.add_argument("--attempts", type=int, default=1)
    sp.add_argument("--resample", action="store_true")
    _add_time_bound(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--max-actions", type=int, default=DEFAULT_MAX_ACTIONS)
    sp.add_argument("--out", required=True)
    sp.add_argument("--no-figures", action="store_true",
                    help="skip PNG rendering")
    _add_llm_flags(sp)
    sp.set_defaults(func=_cmd_bench)

    sp = sub.add_parser("gen", help="generate one instance")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--size", action="append", metavar="KEY=VALUE")
    sp.add_argument("--out", default="")
    sp.set_defaults(func=_cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PddlError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
