"""Task slimming for STRIPS planning.

Parse a PDDL subset, propose prunings of objects, predicates, and action
schemas before grounding, validate the pruned task against the original,
then ground, solve, and compare.
"""

from .pddl import (
    ArityMismatch,
    Atom,
    DomainAst,
    PddlError,
    PddlSyntaxError,
    ProblemAst,
    TaskTypeError,
    UnknownObjectType,
    UnknownPredicate,
    UnsupportedFeature,
    parse_domain,
    parse_problem,
    print_domain,
    print_problem,
)
from .model import (
    GroundAction,
    Plan,
    StripsTask,
    apply_action,
    apply_plan,
    build_task,
    plan_cost,
)
from .grounding import GroundTask, ResourceExceeded, ground
from .search import SearchOutcome, SearchResult, h_add, solve
from .pruning import PruningProposal, apply_proposal, relevance_prune
from .validation import (
    ValidationReport,
    validate_plan,
    validate_pruned,
)
from .llm import LlmConfig, PromptTemplate, SpgOutcome, spg_llm

__version__ = "0.1.0"

__all__ = [
    "ArityMismatch",
    "Atom",
    "DomainAst",
    "GroundAction",
    "GroundTask",
    "LlmConfig",
    "PddlError",
    "PddlSyntaxError",
    "Plan",
    "ProblemAst",
    "PromptTemplate",
    "PruningProposal",
    "ResourceExceeded",
    "SearchOutcome",
    "SearchResult",
    "SpgOutcome",
    "StripsTask",
    "TaskTypeError",
    "UnknownObjectType",
    "UnknownPredicate",
    "UnsupportedFeature",
    "ValidationReport",
    "apply_action",
    "apply_plan",
    "apply_proposal",
    "build_task",
    "ground",
    "h_add",
    "parse_domain",
    "parse_problem",
    "plan_cost",
    "print_domain",
    "print_problem",
    "relevance_prune",
    "solve",
    "spg_llm",
    "validate_plan",
    "validate_pruned",
    "__version__",
]
