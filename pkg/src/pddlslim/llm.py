"""Ask a language model to slim a task, then hold it to account.

The loop is propose-validate-repair: format a prompt around the domain and
problem texts, send it to a backend, extract exactly one domain and one
problem from the reply, and validate the pair at all three levels. On
failure the next attempt carries the previous candidate and a rendering of
what went wrong; after the configured number of attempts the task is
rejected and the caller falls back to the original.

Backends are interchangeable: an HTTP chat-completions client, a scripted
mock for tests and offline runs, and the deterministic relevance analysis
dressed up as a backend so the whole pipeline can run without a model.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field as dc_field
from typing import Callable, Protocol, Sequence

import requests

from . import pddl
from .model import build_task
from .pddl import PddlError, print_domain, print_problem
from .pruning import apply_proposal, relevance_prune
from .validation import Diagnostic, LevelReport, ValidationReport

FINAL_DIRECTIVE = (
    "Please output only the modified files ready to be fed to a planner."
)

DEFAULT_API_KEY_ENV = "SPG_API_KEY"


class TemplateError(PddlError):
    pass


class ExtractionError(PddlError):
    def __init__(self, found_domains: int, found_problems: int) -> None:
        super().__init__(
            "expected exactly one domain and one problem in the reply, "
            f"found {found_domains} domain(s) and {found_problems} problem(s)"
        )
        self.found_domains = found_domains
        self.found_problems = found_problems


class TransportError(PddlError):
    pass


# ── Templates ────────────────────────────────────────────────────────────────

DEFAULT_INITIAL_TEMPLATE = """\
You are a PDDL expert and you will help me simplify a planning task before it
is grounded. Given the domain and problem below, remove whatever is not
needed to reach the goal: objects that no useful action will ever touch,
predicates that only describe removed things, and action schemas that cannot
contribute to the goal. Keep everything else exactly as written. The goal
cannot be modified, so all the objects and predicates present in the goal
cannot be removed.

Here is a small example of the kind of simplification I mean. Input:

(define (domain errands)
  (:requirements :strips :typing)
  (:types parcel depot - object)
  (:predicates (stored ?p - parcel ?d - depot) (held ?p - parcel)
               (tagged ?p - parcel))
  (:action store
    :parameters (?p - parcel ?d - depot)
    :precondition (and (held ?p))
    :effect (and (stored ?p ?d) (not (held ?p))))
  (:action tag
    :parameters (?p - parcel)
    :precondition (and (held ?p))
    :effect (and (tagged ?p))))

(define (problem errand-1)
  (:domain errands)
  (:objects box crate - parcel shed - depot)
  (:init (held box) (held crate))
  (:goal (and (stored box shed))))

The goal only needs box stored in shed, so the crate, the tag action and the
tagged predicate can all go. Output:

(define (domain errands)
  (:requirements :strips :typing)
  (:types parcel depot - object)
  (:predicates (stored ?p - parcel ?d - depot) (held ?p - parcel))
  (:action store
    :parameters (?p - parcel ?d - depot)
    :precondition (and (held ?p))
    :effect (and (stored ?p ?d) (not (held ?p)))))

(define (problem errand-1)
  (:domain errands)
  (:objects box - parcel shed - depot)
  (:init (held box))
  (:goal (and (stored box shed))))

Now simplify this task in the same way.

Domain:

{domain}

Problem:

{problem}

"""

DEFAULT_REPAIR_TEMPLATE = """\
You are a PDDL expert helping me simplify a planning task. Your previous
simplification attempt was rejected. The original task is:

Domain:

{domain}

Problem:

{problem}

Your previous output was:

{prev_domain}

{prev_problem}

It failed validation for the following reasons:

{error}

Produce a corrected simplification. The goal cannot be modified, so all the
objects and predicates present in the goal cannot be removed, and every kept
action and atom must match the original exactly.

"""

REPAIR_SEPARATOR = "=== repair ==="

_INITIAL_PLACEHOLDERS = ("{domain}", "{problem}")
_REPAIR_PLACEHOLDERS = (
    "{domain}",
    "{problem}",
    "{prev_domain}",
    "{prev_problem}",
    "{error}",
)


@dataclass(frozen=True)
class PromptTemplate:
    """Bodies for the first attempt and for retries.

    A template file holds the initial body, optionally followed by a line
    `=== repair ===` and the repair body; without that marker the stock
    repair body is used.
    """

    initial: str = DEFAULT_INITIAL_TEMPLATE
    repair: str = DEFAULT_REPAIR_TEMPLATE

    @classmethod
    def from_file(cls, path: str) -> "PromptTemplate":
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
        if REPAIR_SEPARATOR in text:
            initial, repair = text.split(REPAIR_SEPARATOR, 1)
            return cls(initial=initial.strip() + "\n", repair=repair.strip() + "\n")
        return cls(initial=text, repair=DEFAULT_REPAIR_TEMPLATE)


def _substitute(body: str, values: dict[str, str], required: Sequence[str]) -> str:
    for placeholder in required:
        if body.count(placeholder) != 1:
            raise TemplateError(
                f"template must contain {placeholder} exactly once, "
                f"found {body.count(placeholder)}"
            )
    out = body
    for placeholder in required:
        out = out.replace(placeholder, values[placeholder])
    return out


def format_prompt(
    template: PromptTemplate, domain_text: str, problem_text: str
) -> str:
    """Fill the initial body; the output always ends with the directive."""
    values = {"{domain}": domain_text, "{problem}": problem_text}
    out = _substitute(template.initial, values, _INITIAL_PLACEHOLDERS)
    if not out.rstrip().endswith(FINAL_DIRECTIVE):
        out = out.rstrip() + "\n\n" + FINAL_DIRECTIVE
    return out


def format_repair_prompt(
    template: PromptTemplate,
    domain_text: str,
    problem_text: str,
    prev_domain: str,
    prev_problem: str,
    report: ValidationReport | str,
) -> str:
    error = report if isinstance(report, str) else report.failure_text()
    values = {
        "{domain}": domain_text,
        "{problem}": problem_text,
        "{prev_domain}": prev_domain,
        "{prev_problem}": prev_problem,
        "{error}": error,
    }
    out = _substitute(template.repair, values, _REPAIR_PLACEHOLDERS)
    if not out.rstrip().endswith(FINAL_DIRECTIVE):
        out = out.rstrip() + "\n\n" + FINAL_DIRECTIVE
    return out


# ── Response extraction ──────────────────────────────────────────────────────


def _scan_define_blocks(text: str) -> list[str]:
    """Balanced-paren spans starting at `(define`, comment-aware."""
    spans: list[str] = []
    lower = text.lower()
    i = 0
    n = len(text)
    while i < n:
        if lower[i] == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if lower[i] == "(":
            j = i + 1
            while j < n and lower[j].isspace():
                j += 1
            if lower.startswith("define", j):
                depth = 0
                k = i
                while k < n:
                    ch = text[k]
                    if ch == ";":
                        while k < n and text[k] != "\n":
                            k += 1
                        continue
                    if ch == "(":
                        depth += 1
                    elif ch == ")":
                        depth -= 1
                        if depth == 0:
                            spans.append(text[i : k + 1])
                            i = k
                            break
                    k += 1
        i += 1
    return spans


def _block_kind(block: str) -> str | None:
    rest = block.lower().split("define", 1)[1].lstrip()
    if rest.startswith("("):
        head = rest[1:].lstrip()
        if head.startswith("domain"):
            return "domain"
        if head.startswith("problem"):
            return "problem"
    return None


def extract_task_files(response: str) -> tuple[str, str]:
    """Pull exactly one domain and one problem out of free-form model text.

    Works on balanced parentheses, so surrounding prose and markdown fences
    are irrelevant.
    """
    domains: list[str] = []
    problems: list[str] = []
    for block in _scan_define_blocks(response):
        kind = _block_kind(block)
        if kind == "domain":
            domains.append(block)
        elif kind == "problem":
            problems.append(block)
    if len(domains) != 1 or len(problems) != 1:
        raise ExtractionError(len(domains), len(problems))
    return domains[0], problems[0]


# ── Backends ─────────────────────────────────────────────────────────────────


@dataclass
class LlmConfig:
    backend: str = "mock"  # http | mock | rule
    endpoint: str = ""
    model: str = ""
    max_attempts: int = 1
    request_timeout: float = 120.0
    api_key_env: str = DEFAULT_API_KEY_ENV
    repair_prompting: bool = True
    min_request_interval: float = 0.0
    extra: dict = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")


class Backend(Protocol):
    def complete(self, prompt: str) -> str: ...


class HttpBackend:
    """Chat-completions client; one user message in, first choice out."""

    def __init__(self, config: LlmConfig) -> None:
        if not config.endpoint:
            raise TransportError("no endpoint configured for the http backend")
        self.config = config
        self._last_request = 0.0

    def complete(self, prompt: str) -> str:
        cfg = self.config
        if cfg.min_request_interval > 0:
            wait = self._last_request + cfg.min_request_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(cfg.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        payload.update(cfg.extra)
        try:
            self._last_request = time.monotonic()
            resp = requests.post(
                cfg.endpoint,
                json=payload,
                headers=headers,
                timeout=cfg.request_timeout,
            )
            resp.raise_for_status()
            data = resp.json()
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from exc
        except ValueError as exc:
            raise TransportError(f"response is not JSON: {exc}") from exc
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion payload: {exc}") from exc


class MockBackend:
    """Replays a script; the last entry repeats if attempts outnumber it."""

    def __init__(self, script: Sequence[str]) -> None:
        if not script:
            raise ValueError("mock backend needs at least one response")
        self.script = list(script)
        self.calls = 0

    def complete(self, prompt: str) -> str:
        index = min(self.calls, len(self.script) - 1)
        self.calls += 1
        return self.script[index]


def identity_mock(domain_text: str, problem_text: str) -> MockBackend:
    """A mock that proposes the task unchanged."""
    return MockBackend([domain_text + "\n\n" + problem_text])


class RuleBackend:
    """Relevance analysis wearing the backend interface.

    Deterministic and prompt-blind: every call recomputes the same proposal
    from the original task and prints the resulting pair.
    """

    def __init__(self, domain_text: str, problem_text: str) -> None:
        dom = pddl.parse_domain(domain_text)
        prob = pddl.parse_problem(problem_text, dom)
        self.task = build_task(dom, prob)
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        proposal = relevance_prune(self.task)
        new_dom, new_prob = apply_proposal(self.task, proposal)
        return print_domain(new_dom) + "\n" + print_problem(new_prob)


def make_backend(
    config: LlmConfig, domain_text: str, problem_text: str
) -> Backend:
    if config.backend == "http":
        return HttpBackend(config)
    if config.backend == "mock":
        return identity_mock(domain_text, problem_text)
    if config.backend == "rule":
        return RuleBackend(domain_text, problem_text)
    raise ValueError(f"unknown backend '{config.backend}'")


# ── The propose-validate-repair loop ─────────────────────────────────────────


@dataclass
class Attempt:
    prompt: str
    response: str | None
    report: ValidationReport


@dataclass
class SpgOutcome:
    status: str  # accepted | rejected
    domain_text: str | None
    problem_text: str | None
    attempts: list[Attempt]

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"


def _failure_report(code: str, message: str) -> ValidationReport:
    return ValidationReport(
        syntactic=LevelReport(
            "syntactic", passed=False, diagnostics=[Diagnostic(code, message)]
        )
    )


def spg_llm(
    domain_text: str,
    problem_text: str,
    template: PromptTemplate,
    config: LlmConfig,
    validator: Callable[[str, str], ValidationReport],
    backend: Backend | None = None,
) -> SpgOutcome:
    """Run up to `config.max_attempts` propose-validate rounds.

    Exactly one backend call per attempt. A rejected outcome means the
    caller should plan on the original task; nothing from failed attempts
    leaks into it.
    """
    if backend is None:
        backend = make_backend(config, domain_text, problem_text)
    attempts: list[Attempt] = []
    prompt = format_prompt(template, domain_text, problem_text)
    prev_domain, prev_problem = "", ""
    for _ in range(config.max_attempts):
        if attempts and config.repair_prompting:
            prompt = format_repair_prompt(
                template,
                domain_text,
                problem_text,
                prev_domain,
                prev_problem,
                attempts[-1].report,
            )
        try:
            response = backend.complete(prompt)
        except TransportError as exc:
            attempts.append(
                Attempt(prompt, None, _failure_report("transport-error", str(exc)))
            )
            prev_domain, prev_problem = "", ""
            continue
        try:
            candidate_domain, candidate_problem = extract_task_files(response)
        except ExtractionError as exc:
            attempts.append(
                Attempt(
                    prompt, response, _failure_report("extraction-error", str(exc))
                )
            )
            prev_domain, prev_problem = response, ""
            continue
        report = validator(candidate_domain, candidate_problem)
        attempts.append(Attempt(prompt, response, report))
        prev_domain, prev_problem = candidate_domain, candidate_problem
        if report.passed:
            return SpgOutcome(
                "accepted", candidate_domain, candidate_problem, attempts
            )
    return SpgOutcome("rejected", None, None, attempts)
