"""Read and write a STRIPS subset of PDDL 2.1.

Supported requirements: :strips, :typing, :action-costs, :equality.
Everything else in the language (negative preconditions on predicates,
conditional effects, quantifiers, disjunctions, numeric fluents other than
total-cost) is rejected with a positioned error rather than silently dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

SUPPORTED_REQUIREMENTS = frozenset(
    {":strips", ":typing", ":action-costs", ":equality"}
)

ROOT_TYPE = "object"


# ── Errors ───────────────────────────────────────────────────────────────────


class PddlError(Exception):
    """Base class for every error raised by this package."""


class PddlSyntaxError(PddlError):
    """Malformed input, with the source position that triggered it."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnsupportedFeature(PddlError):
    """Input is valid PDDL but outside the supported subset."""

    def __init__(self, feature: str, line: int = 0, column: int = 0) -> None:
        where = f" at line {line}, column {column}" if line else ""
        super().__init__(f"unsupported feature{where}: {feature}")
        self.feature = feature


class UnknownPredicate(PddlError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown predicate '{name}'")
        self.name = name


class ArityMismatch(PddlError):
    def __init__(self, predicate: str, expected: int, got: int) -> None:
        super().__init__(
            f"predicate '{predicate}' expects {expected} arguments, got {got}"
        )
        self.predicate = predicate
        self.expected = expected
        self.got = got


class UnknownObjectType(PddlError):
    def __init__(self, name: str, type_name: str) -> None:
        super().__init__(f"'{name}' is declared with unknown type '{type_name}'")
        self.name = name
        self.type_name = type_name


class TaskTypeError(PddlError):
    """A ground atom names an unknown object or violates a declared type."""


# ── AST types ────────────────────────────────────────────────────────────────


@dataclass(frozen=True, order=True)
class Atom:
    """A predicate applied to arguments (variables or object names)."""

    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)


@dataclass(frozen=True, order=True)
class EqualityCondition:
    """An (in)equality constraint between two schema parameters."""

    left: str
    right: str
    negated: bool

    def __str__(self) -> str:
        base = f"(= {self.left} {self.right})"
        return f"(not {base})" if self.negated else base


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def param_types(self) -> tuple[str, ...]:
        return tuple(t for _, t in self.params)


@dataclass(frozen=True)
class SchemaAst:
    """An action schema with positive preconditions and STRIPS effects.

    Atom lists are stored deduplicated and sorted; del_effects never overlap
    add_effects (adds win, matching PDDL effect semantics).
    """

    name: str
    parameters: tuple[tuple[str, str], ...]
    precondition: tuple[Atom, ...]
    add_effects: tuple[Atom, ...]
    del_effects: tuple[Atom, ...]
    equalities: tuple[EqualityCondition, ...] = ()
    cost: Fraction = Fraction(1)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.parameters)


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple[str, ...]
    types: tuple[tuple[str, str], ...]
    predicates: tuple[PredicateDecl, ...]
    schemas: tuple[SchemaAst, ...]

    def predicate_map(self) -> dict[str, PredicateDecl]:
        return {p.name: p for p in self.predicates}


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]
    init: tuple[Atom, ...]
    goal: tuple[Atom, ...]
    total_cost_init: Fraction | None = None


# ── Lexer ────────────────────────────────────────────────────────────────────

_NAME_RE = re.compile(r"[a-zA-Z0-9_][a-zA-Z0-9_\-.]*")
_NUMBER_RE = re.compile(r"[0-9]+(?:\.[0-9]+)?")


@dataclass(frozen=True)
class Token:
    kind: str  # LP RP NAME VAR KEY NUM EQ DASH EOF
    value: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    line_start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if ch.isspace():
            i += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        col = i - line_start + 1
        if ch == "(":
            tokens.append(Token("LP", "(", line, col))
            i += 1
        elif ch == ")":
            tokens.append(Token("RP", ")", line, col))
            i += 1
        elif ch == "?":
            m = _NAME_RE.match(text, i + 1)
            if not m:
                raise PddlSyntaxError("dangling '?'", line, col)
            tokens.append(Token("VAR", "?" + m.group().lower(), line, col))
            i = m.end()
        elif ch == ":":
            m = _NAME_RE.match(text, i + 1)
            if not m:
                raise PddlSyntaxError("dangling ':'", line, col)
            tokens.append(Token("KEY", m.group().lower(), line, col))
            i = m.end()
        elif ch == "=":
            tokens.append(Token("EQ", "=", line, col))
            i += 1
        elif ch == "-" and (i + 1 >= n or not _NAME_RE.match(text, i + 1)):
            tokens.append(Token("DASH", "-", line, col))
            i += 1
        else:
            m = _NUMBER_RE.match(text, i)
            if m and (m.end() >= n or not _NAME_RE.match(text, m.end())):
                tokens.append(Token("NUM", m.group(), line, col))
                i = m.end()
                continue
            if ch == "-":
                # A leading dash on a name is not legal PDDL.
                raise PddlSyntaxError("unexpected '-'", line, col)
            m = _NAME_RE.match(text, i)
            if not m:
                raise PddlSyntaxError(f"unexpected character {ch!r}", line, col)
            tokens.append(Token("NAME", m.group().lower(), line, col))
            i = m.end()
    tokens.append(Token("EOF", "", line, n - line_start + 1))
    return tokens


# ── Parser ───────────────────────────────────────────────────────────────────


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.pos = 0

    # basic cursor helpers

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise PddlSyntaxError(
                f"expected {what}, got {tok.value!r}", tok.line, tok.column
            )
        return tok

    def expect_name(self, expected: str) -> Token:
        tok = self.expect("NAME", f"'{expected}'")
        if tok.value != expected:
            raise PddlSyntaxError(
                f"expected '{expected}', got {tok.value!r}", tok.line, tok.column
            )
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    # shared pieces

    def typed_list(self, kind: str, what: str) -> list[tuple[str, str]]:
        """Parse `n1 n2 - t n3 - u n4` up to the closing paren.

        Untyped trailing names default to the root type.
        """
        out: list[tuple[str, str]] = []
        pending: list[str] = []
        while not self.at("RP"):
            if self.at("DASH"):
                dash = self.next()
                if not pending:
                    raise PddlSyntaxError(
                        "'-' without preceding names", dash.line, dash.column
                    )
                tname = self.expect("NAME", "a type name").value
                out.extend((n, tname) for n in pending)
                pending = []
            else:
                tok = self.expect(kind, what)
                pending.append(tok.value)
        out.extend((n, ROOT_TYPE) for n in pending)
        return out

    def number(self) -> Fraction:
        tok = self.expect("NUM", "a number")
        return Fraction(tok.value)

    def atom(self, allow_vars: bool) -> Atom:
        """Parse `(pred arg*)` whose opening paren is already consumed."""
        head = self.expect("NAME", "a predicate name")
        args: list[str] = []
        while not self.at("RP"):
            tok = self.next()
            if tok.kind == "VAR":
                if not allow_vars:
                    raise PddlSyntaxError(
                        f"variable {tok.value!r} in a ground atom",
                        tok.line,
                        tok.column,
                    )
                args.append(tok.value)
            elif tok.kind == "NAME":
                args.append(tok.value)
            else:
                raise PddlSyntaxError(
                    f"unexpected {tok.value!r} in atom", tok.line, tok.column
                )
        self.expect("RP", "')'")
        return Atom(head.value, tuple(args))


def _parse_requirements(p: _Parser) -> tuple[str, ...]:
    tags: set[str] = set()
    while not p.at("RP"):
        tok = p.expect("KEY", "a requirement tag")
        tag = ":" + tok.value
        if tag not in SUPPORTED_REQUIREMENTS:
            raise UnsupportedFeature(tag, tok.line, tok.column)
        tags.add(tag)
    p.next()
    return tuple(sorted(tags))


def _parse_types(p: _Parser, opener: Token) -> tuple[tuple[str, str], ...]:
    pairs = p.typed_list("NAME", "a type name")
    p.next()  # RP
    seen: set[str] = set()
    for name, _parent in pairs:
        if name == ROOT_TYPE:
            raise PddlSyntaxError(
                f"'{ROOT_TYPE}' is built in and cannot be redeclared",
                opener.line,
                opener.column,
            )
        if name in seen:
            raise PddlSyntaxError(
                f"duplicate type declaration '{name}'", opener.line, opener.column
            )
        seen.add(name)
    declared = seen | {ROOT_TYPE}
    for name, parent in pairs:
        if parent not in declared:
            raise UnknownObjectType(name, parent)
    # Reject cycles: every type must reach the root by parent edges.
    parents = dict(pairs)
    for name in parents:
        cur, hops = name, 0
        while cur != ROOT_TYPE:
            cur = parents.get(cur, ROOT_TYPE)
            hops += 1
            if hops > len(parents):
                raise PddlSyntaxError(
                    f"type hierarchy cycle through '{name}'",
                    opener.line,
                    opener.column,
                )
    return tuple(pairs)


def _parse_predicates(
    p: _Parser, declared_types: set[str]
) -> tuple[PredicateDecl, ...]:
    decls: list[PredicateDecl] = []
    names: set[str] = set()
    while not p.at("RP"):
        opener = p.expect("LP", "'('")
        head = p.expect("NAME", "a predicate name")
        params = p.typed_list("VAR", "a parameter variable")
        p.next()  # RP
        if head.value in names:
            raise PddlSyntaxError(
                f"duplicate predicate '{head.value}'", head.line, head.column
            )
        names.add(head.value)
        if len({v for v, _ in params}) != len(params):
            raise PddlSyntaxError(
                f"duplicate parameter in predicate '{head.value}'",
                opener.line,
                opener.column,
            )
        for var, tname in params:
            if tname not in declared_types:
                raise UnknownObjectType(var, tname)
        decls.append(PredicateDecl(head.value, tuple(params)))
    p.next()
    return tuple(decls)


def _parse_functions(p: _Parser) -> None:
    # Only a bare (total-cost) declaration is inside the subset.
    while not p.at("RP"):
        opener = p.expect("LP", "'('")
        head = p.expect("NAME", "a function name")
        if head.value != "total-cost" or not p.at("RP"):
            raise UnsupportedFeature(
                f"function '{head.value}'", opener.line, opener.column
            )
        p.next()
        if p.at("DASH"):
            p.next()
            p.expect("NAME", "'number'")
    p.next()


@dataclass
class _EffectAccumulator:
    add: set[Atom] = field(default_factory=set)
    delete: set[Atom] = field(default_factory=set)
    cost: Fraction | None = None


def _check_schema_atom(
    atom: Atom,
    predicates: Mapping[str, PredicateDecl],
    params: Mapping[str, str],
    where: Token,
) -> None:
    decl = predicates.get(atom.predicate)
    if decl is None:
        raise UnknownPredicate(atom.predicate)
    if decl.arity != len(atom.args):
        raise ArityMismatch(atom.predicate, decl.arity, len(atom.args))
    for arg in atom.args:
        if not arg.startswith("?"):
            raise UnsupportedFeature(
                "constants in action bodies", where.line, where.column
            )
        if arg not in params:
            raise PddlSyntaxError(
                f"variable {arg!r} is not a parameter", where.line, where.column
            )


def _parse_condition_item(
    p: _Parser,
    opener: Token,
    atoms: list[Atom],
    eqs: list[EqualityCondition],
    params: Mapping[str, str],
    predicates: Mapping[str, PredicateDecl],
) -> None:
    """Parse one conjunct of a precondition (opening paren consumed)."""
    tok = p.peek()
    if tok.kind == "EQ":
        p.next()
        left = p.expect("VAR", "a parameter variable")
        right = p.expect("VAR", "a parameter variable")
        p.expect("RP", "')'")
        for v in (left, right):
            if v.value not in params:
                raise PddlSyntaxError(
                    f"variable {v.value!r} is not a parameter", v.line, v.column
                )
        lo, hi = sorted((left.value, right.value))
        eqs.append(EqualityCondition(lo, hi, negated=False))
        return
    if tok.kind == "NAME" and tok.value == "not":
        p.next()
        inner = p.expect("LP", "'('")
        if p.peek().kind != "EQ":
            raise UnsupportedFeature(
                ":negative-preconditions", inner.line, inner.column
            )
        p.next()
        left = p.expect("VAR", "a parameter variable")
        right = p.expect("VAR", "a parameter variable")
        p.expect("RP", "')'")
        p.expect("RP", "')'")
        for v in (left, right):
            if v.value not in params:
                raise PddlSyntaxError(
                    f"variable {v.value!r} is not a parameter", v.line, v.column
                )
        lo, hi = sorted((left.value, right.value))
        eqs.append(EqualityCondition(lo, hi, negated=True))
        return
    if tok.kind == "NAME" and tok.value in (
        "or",
        "imply",
        "forall",
        "exists",
        "when",
    ):
        raise UnsupportedFeature(f"'{tok.value}' conditions", tok.line, tok.column)
    atom = p.atom(allow_vars=True)
    _check_schema_atom(atom, predicates, params, opener)
    atoms.append(atom)


def _parse_effect_item(
    p: _Parser,
    opener: Token,
    acc: _EffectAccumulator,
    params: Mapping[str, str],
    predicates: Mapping[str, PredicateDecl],
) -> None:
    tok = p.peek()
    if tok.kind == "NAME" and tok.value == "not":
        p.next()
        inner_opener = p.expect("LP", "'('")
        atom = p.atom(allow_vars=True)
        p.expect("RP", "')'")
        _check_schema_atom(atom, predicates, params, inner_opener)
        acc.delete.add(atom)
        return
    if tok.kind == "NAME" and tok.value == "increase":
        p.next()
        p.expect("LP", "'('")
        fn = p.expect("NAME", "'total-cost'")
        if fn.value != "total-cost":
            raise UnsupportedFeature(
                f"numeric effect on '{fn.value}'", fn.line, fn.column
            )
        p.expect("RP", "')'")
        amount = p.number()
        p.expect("RP", "')'")
        if acc.cost is not None:
            raise PddlSyntaxError(
                "multiple total-cost effects", opener.line, opener.column
            )
        if amount < 0:
            raise PddlSyntaxError(
                "negative action cost", opener.line, opener.column
            )
        acc.cost = amount
        return
    if tok.kind == "NAME" and tok.value in ("when", "forall", "assign", "decrease"):
        raise UnsupportedFeature(f"'{tok.value}' effects", tok.line, tok.column)
    atom = p.atom(allow_vars=True)
    _check_schema_atom(atom, predicates, params, opener)
    acc.add.add(atom)


def _parse_action(
    p: _Parser,
    declared_types: set[str],
    predicates: Mapping[str, PredicateDecl],
) -> SchemaAst:
    head = p.expect("NAME", "an action name")
    key = p.expect("KEY", "':parameters'")
    if key.value != "parameters":
        raise PddlSyntaxError(
            f"expected ':parameters', got '{key.value}'", key.line, key.column
        )
    p.expect("LP", "'('")
    parameters = p.typed_list("VAR", "a parameter variable")
    p.next()  # RP
    if len({v for v, _ in parameters}) != len(parameters):
        raise PddlSyntaxError(
            f"duplicate parameter in action '{head.value}'", head.line, head.column
        )
    for var, tname in parameters:
        if tname not in declared_types:
            raise UnknownObjectType(var, tname)
    params = dict(parameters)

    pre_atoms: list[Atom] = []
    eqs: list[EqualityCondition] = []
    acc = _EffectAccumulator()
    while p.at("KEY"):
        key = p.next()
        if key.value == "precondition":
            opener = p.expect("LP", "'('")
            if p.at("NAME", "and"):
                p.next()
                while not p.at("RP"):
                    inner = p.expect("LP", "'('")
                    _parse_condition_item(p, inner, pre_atoms, eqs, params, predicates)
                p.next()
            elif p.at("RP"):
                p.next()
            else:
                _parse_condition_item(p, opener, pre_atoms, eqs, params, predicates)
        elif key.value == "effect":
            opener = p.expect("LP", "'('")
            if p.at("NAME", "and"):
                p.next()
                while not p.at("RP"):
                    inner = p.expect("LP", "'('")
                    _parse_effect_item(p, inner, acc, params, predicates)
                p.next()
            elif p.at("RP"):
                p.next()
            else:
                _parse_effect_item(p, opener, acc, params, predicates)
        else:
            raise PddlSyntaxError(
                f"unexpected ':{key.value}' in action", key.line, key.column
            )
    p.expect("RP", "')'")
    return SchemaAst(
        name=head.value,
        parameters=tuple(parameters),
        precondition=tuple(sorted(set(pre_atoms))),
        add_effects=tuple(sorted(acc.add)),
        del_effects=tuple(sorted(acc.delete - acc.add)),
        equalities=tuple(sorted(set(eqs))),
        cost=acc.cost if acc.cost is not None else Fraction(1),
    )


def parse_domain(text: str) -> DomainAst:
    """Parse a domain file into its AST, rejecting anything off-subset."""
    p = _Parser(text)
    p.expect("LP", "'('")
    p.expect_name("define")
    p.expect("LP", "'('")
    p.expect_name("domain")
    name = p.expect("NAME", "a domain name").value
    p.expect("RP", "')'")

    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    schemas: list[SchemaAst] = []
    seen_sections: set[str] = set()
    while p.at("LP"):
        p.next()
        key = p.expect("KEY", "a domain section")
        if key.value in ("requirements", "types", "predicates", "functions"):
            if key.value in seen_sections:
                raise PddlSyntaxError(
                    f"duplicate :{key.value} section", key.line, key.column
                )
            seen_sections.add(key.value)
        if key.value == "requirements":
            requirements = _parse_requirements(p)
        elif key.value == "types":
            types = _parse_types(p, key)
        elif key.value == "predicates":
            declared = {t for t, _ in types} | {ROOT_TYPE}
            predicates = _parse_predicates(p, declared)
        elif key.value == "functions":
            _parse_functions(p)
        elif key.value == "action":
            declared = {t for t, _ in types} | {ROOT_TYPE}
            pred_map = {d.name: d for d in predicates}
            schemas.append(_parse_action(p, declared, pred_map))
        elif key.value in ("constants", "durative-action", "derived", "axiom"):
            raise UnsupportedFeature(f":{key.value}", key.line, key.column)
        else:
            raise PddlSyntaxError(
                f"unknown domain section ':{key.value}'", key.line, key.column
            )
    p.expect("RP", "')'")
    tok = p.peek()
    if tok.kind != "EOF":
        raise PddlSyntaxError("trailing text after domain", tok.line, tok.column)

    names = [s.name for s in schemas]
    if len(set(names)) != len(names):
        dup = sorted(n for n in set(names) if names.count(n) > 1)[0]
        raise PddlSyntaxError(f"duplicate action name '{dup}'", 1, 1)
    return DomainAst(
        name=name,
        requirements=requirements,
        types=types,
        predicates=predicates,
        schemas=tuple(schemas),
    )


# ── Type hierarchy helpers ───────────────────────────────────────────────────


def build_parent_map(types: tuple[tuple[str, str], ...]) -> dict[str, str]:
    """Map each declared type to its parent; the root maps to itself."""
    parents = {ROOT_TYPE: ROOT_TYPE}
    parents.update(types)
    return parents


def is_subtype(t1: str, t2: str, parents: Mapping[str, str]) -> bool:
    """True iff t1 reaches t2 by parent edges (reflexively)."""
    cur = t1
    while True:
        if cur == t2:
            return True
        nxt = parents.get(cur, ROOT_TYPE)
        if nxt == cur:
            return False
        cur = nxt


def check_ground_atom(
    atom: Atom,
    predicates: Mapping[str, PredicateDecl],
    objects: Mapping[str, str],
    parents: Mapping[str, str],
) -> None:
    """Raise if a ground atom is unknown, mis-sized, or ill-typed."""
    decl = predicates.get(atom.predicate)
    if decl is None:
        raise UnknownPredicate(atom.predicate)
    if decl.arity != len(atom.args):
        raise ArityMismatch(atom.predicate, decl.arity, len(atom.args))
    for arg, (_, want) in zip(atom.args, decl.params):
        got = objects.get(arg)
        if got is None:
            raise TaskTypeError(f"atom {atom} uses undeclared object '{arg}'")
        if not is_subtype(got, want, parents):
            raise TaskTypeError(
                f"atom {atom}: object '{arg}' has type '{got}', "
                f"which is not a subtype of '{want}'"
            )


# ── Problem parsing ──────────────────────────────────────────────────────────


def _parse_init(
    p: _Parser,
    predicates: Mapping[str, PredicateDecl],
    objects: Mapping[str, str],
    parents: Mapping[str, str],
) -> tuple[tuple[Atom, ...], Fraction | None]:
    atoms: set[Atom] = set()
    cost_init: Fraction | None = None
    while not p.at("RP"):
        opener = p.expect("LP", "'('")
        tok = p.peek()
        if tok.kind == "EQ":
            p.next()
            p.expect("LP", "'('")
            fn = p.expect("NAME", "'total-cost'")
            if fn.value != "total-cost":
                raise UnsupportedFeature(
                    f"numeric fluent '{fn.value}'", fn.line, fn.column
                )
            p.expect("RP", "')'")
            value = p.number()
            p.expect("RP", "')'")
            if cost_init is not None:
                raise PddlSyntaxError(
                    "duplicate total-cost initializer", opener.line, opener.column
                )
            cost_init = value
            continue
        if tok.kind == "NAME" and tok.value == "not":
            raise UnsupportedFeature(
                "negative literals in :init", tok.line, tok.column
            )
        atom = p.atom(allow_vars=False)
        check_ground_atom(atom, predicates, objects, parents)
        atoms.add(atom)
    p.next()
    return tuple(sorted(atoms)), cost_init


def _parse_goal(
    p: _Parser,
    predicates: Mapping[str, PredicateDecl],
    objects: Mapping[str, str],
    parents: Mapping[str, str],
) -> tuple[Atom, ...]:
    opener = p.expect("LP", "'('")
    atoms: set[Atom] = set()

    def one(inner_opener: Token) -> None:
        tok = p.peek()
        if tok.kind == "NAME" and tok.value in (
            "not",
            "or",
            "imply",
            "forall",
            "exists",
        ):
            raise UnsupportedFeature(
                f"'{tok.value}' in goals", tok.line, tok.column
            )
        atom = p.atom(allow_vars=False)
        check_ground_atom(atom, predicates, objects, parents)
        atoms.add(atom)

    if p.at("NAME", "and"):
        p.next()
        while not p.at("RP"):
            inner = p.expect("LP", "'('")
            one(inner)
        p.next()
    else:
        one(opener)
    p.expect("RP", "')'")
    return tuple(sorted(atoms))


def parse_problem(text: str, dom: DomainAst) -> ProblemAst:
    """Parse a problem file and check its atoms against the domain."""
    p = _Parser(text)
    p.expect("LP", "'('")
    p.expect_name("define")
    p.expect("LP", "'('")
    p.expect_name("problem")
    name = p.expect("NAME", "a problem name").value
    p.expect("RP", "')'")

    parents = build_parent_map(dom.types)
    declared_types = set(parents)
    predicates = dom.predicate_map()
    domain_name: str | None = None
    objects: tuple[tuple[str, str], ...] = ()
    init: tuple[Atom, ...] = ()
    cost_init: Fraction | None = None
    goal: tuple[Atom, ...] | None = None
    seen_sections: set[str] = set()
    while p.at("LP"):
        p.next()
        key = p.expect("KEY", "a problem section")
        if key.value in seen_sections:
            raise PddlSyntaxError(
                f"duplicate :{key.value} section", key.line, key.column
            )
        seen_sections.add(key.value)
        if key.value == "domain":
            domain_name = p.expect("NAME", "a domain name").value
            p.expect("RP", "')'")
        elif key.value == "requirements":
            _parse_requirements(p)
        elif key.value == "objects":
            pairs = p.typed_list("NAME", "an object name")
            p.next()
            seen: set[str] = set()
            for obj, tname in pairs:
                if obj in seen:
                    raise PddlSyntaxError(
                        f"duplicate object '{obj}'", key.line, key.column
                    )
                seen.add(obj)
                if tname not in declared_types:
                    raise UnknownObjectType(obj, tname)
            objects = tuple(pairs)
        elif key.value == "init":
            obj_map = dict(objects)
            init, cost_init = _parse_init(p, predicates, obj_map, parents)
        elif key.value == "goal":
            obj_map = dict(objects)
            goal = _parse_goal(p, predicates, obj_map, parents)
        elif key.value == "metric":
            direction = p.expect("NAME", "'minimize'")
            if direction.value != "minimize":
                raise UnsupportedFeature(
                    f"metric '{direction.value}'", direction.line, direction.column
                )
            p.expect("LP", "'('")
            fn = p.expect("NAME", "'total-cost'")
            if fn.value != "total-cost":
                raise UnsupportedFeature(
                    f"metric over '{fn.value}'", fn.line, fn.column
                )
            p.expect("RP", "')'")
            p.expect("RP", "')'")
        else:
            raise PddlSyntaxError(
                f"unknown problem section ':{key.value}'", key.line, key.column
            )
    p.expect("RP", "')'")
    tok = p.peek()
    if tok.kind != "EOF":
        raise PddlSyntaxError("trailing text after problem", tok.line, tok.column)
    if domain_name is None:
        raise PddlSyntaxError("problem lacks a (:domain ...) section", 1, 1)
    if goal is None:
        raise PddlSyntaxError("problem lacks a (:goal ...) section", 1, 1)
    return ProblemAst(
        name=name,
        domain_name=domain_name,
        objects=objects,
        init=init,
        goal=goal,
        total_cost_init=cost_init,
    )


# ── Canonical printing ───────────────────────────────────────────────────────


def format_number(value: Fraction) -> str:
    """Exact decimal rendering; integers print without a point."""
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    for base in (2, 5):
        while den % base == 0:
            den //= base
    if den != 1:
        raise PddlError(f"cost {value} has no finite decimal form")
    scaled = value
    digits = 0
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    text = str(scaled.numerator).rjust(digits + 1, "0")
    return f"{text[:-digits]}.{text[-digits:]}"


def _format_typed_list(pairs: tuple[tuple[str, str], ...]) -> str:
    """Group consecutive same-type runs: `a b - t c - u`.

    A trailing root-typed run omits its suffix; the parser defaults
    untyped trailing names to the root, so the rendering reparses to
    the same list.
    """
    parts: list[str] = []
    run: list[str] = []
    run_type: str | None = None
    for name, tname in pairs:
        if tname != run_type and run:
            parts.append(f"{' '.join(run)} - {run_type}")
            run = []
        run.append(name)
        run_type = tname
    if run:
        if run_type == ROOT_TYPE:
            parts.append(" ".join(run))
        else:
            parts.append(f"{' '.join(run)} - {run_type}")
    return " ".join(parts)


def _uses_costs(dom: DomainAst) -> bool:
    if ":action-costs" in dom.requirements:
        return True
    return any(s.cost != 1 for s in dom.schemas)


def _print_schema(s: SchemaAst, with_costs: bool) -> str:
    lines = [f"  (:action {s.name}"]
    lines.append(f"    :parameters ({_format_typed_list(s.parameters)})")
    pre = [str(a) for a in s.precondition] + [str(e) for e in s.equalities]
    if pre:
        lines.append(f"    :precondition (and {' '.join(pre)})")
    else:
        lines.append("    :precondition (and)")
    eff = [str(a) for a in s.add_effects]
    eff += [f"(not {a})" for a in s.del_effects]
    if with_costs:
        eff.append(f"(increase (total-cost) {format_number(s.cost)})")
    if eff:
        lines.append(f"    :effect (and {' '.join(eff)}))")
    else:
        lines.append("    :effect (and))")
    return "\n".join(lines)


def print_domain(dom: DomainAst) -> str:
    """Render a domain canonically: stable layout, lower case, two-space indent."""
    lines = [f"(define (domain {dom.name})"]
    if dom.requirements:
        lines.append(f"  (:requirements {' '.join(dom.requirements)})")
    if dom.types:
        lines.append(f"  (:types {_format_typed_list(dom.types)})")
    if dom.predicates:
        decls = []
        for d in dom.predicates:
            if d.params:
                decls.append(f"    ({d.name} {_format_typed_list(d.params)})")
            else:
                decls.append(f"    ({d.name})")
        lines.append("  (:predicates\n" + "\n".join(decls) + ")")
    with_costs = _uses_costs(dom)
    if with_costs:
        lines.append("  (:functions (total-cost))")
    for s in dom.schemas:
        lines.append(_print_schema(s, with_costs))
    return "\n".join(lines) + ")\n"


def print_problem(prob: ProblemAst) -> str:
    lines = [f"(define (problem {prob.name})"]
    lines.append(f"  (:domain {prob.domain_name})")
    if prob.objects:
        lines.append(f"  (:objects {_format_typed_list(prob.objects)})")
    init_parts = [f"    {a}" for a in prob.init]
    if prob.total_cost_init is not None:
        init_parts.append(
            f"    (= (total-cost) {format_number(prob.total_cost_init)})"
        )
    if init_parts:
        lines.append("  (:init\n" + "\n".join(init_parts) + ")")
    else:
        lines.append("  (:init)")
    goal_parts = " ".join(str(a) for a in prob.goal)
    lines.append(f"  (:goal (and {goal_parts}))" if goal_parts
                 else "  (:goal (and))")
    if prob.total_cost_init is not None:
        lines.append("  (:metric minimize (total-cost))")
    return "\n".join(lines) + ")\n"
