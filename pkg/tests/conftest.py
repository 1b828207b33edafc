from __future__ import annotations

from pathlib import Path

import pytest

from pddlslim import build_task, parse_domain, parse_problem
from pddlslim.model import StripsTask

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_task(domain_name: str, problem_name: str) -> StripsTask:
    dom = parse_domain(fixture_text(domain_name))
    prob = parse_problem(fixture_text(problem_name), dom)
    return build_task(dom, prob)


@pytest.fixture(scope="session")
def bw4_task() -> StripsTask:
    return load_task("bw4_domain.pddl", "bw4_prob.pddl")


@pytest.fixture(scope="session")
def bw5_task() -> StripsTask:
    return load_task("bw5_domain.pddl", "bw5_prob.pddl")


@pytest.fixture(scope="session")
def zeno_task() -> StripsTask:
    return load_task("zeno_domain.pddl", "zeno_prob.pddl")


@pytest.fixture(scope="session")
def typed_task() -> StripsTask:
    return load_task("typed_domain.pddl", "typed_prob.pddl")
