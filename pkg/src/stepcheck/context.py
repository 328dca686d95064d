"""Fitch-style contexts: ordered, classified statements with premise references.

Concrete file format, one statement per line::

    @problem: Compute f(4) for the Fibonacci function.
    @goal: f(4) = 3
    0 | DEFINITION: definition(f): NN -> NN f(n) := f(n-1) + f(n-2), if n >= 3 | 1, if n = 2 | 1, if n = 1
    1 | CONCLUSION[0]: f(3) = 2 // f(3) = f(2) + f(1)
    2 | | ASSUMPTION: x > 2
    3 | | CONCLUSION[2]: x > 1
    4 | CONCLUSION[2, 3]: x > 2 -> x > 1

Extra ``|`` bars after the id give the nesting depth under open assumptions.
Lines that do not start with ``<id> |`` continue the previous statement;
``#`` starts a comment line. Text after ``//`` is the informal source sentence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union

from .errors import (
    ContextError, NestingError, ParseError, PremiseReferenceError, StructureError,
)
from .lang import (
    Definition, Formula, Implies, ac_normalize, from_json, functions_used,
    parse_definition, parse_formula, print_definition, print_formula, to_json,
)

MAX_PREMISES = 4


class StatementKind(Enum):
    FACT = "Fact"
    ASSUMPTION = "Assumption"
    THEOREM = "Theorem"
    DEFINITION = "Definition"
    CONCLUSION = "Conclusion"

    @classmethod
    def parse(cls, word: str) -> "StatementKind":
        for kind in cls:
            if kind.value.lower() == word.lower():
                return kind
        raise ValueError(f"unknown statement kind {word!r}")


Body = Union[Formula, Definition]


@dataclass(frozen=True)
class Statement:
    id: int
    kind: StatementKind
    body: Body
    premises: tuple[int, ...] = ()
    source_text: str | None = None
    depth: int = 0

    @property
    def is_definition(self) -> bool:
        return isinstance(self.body, Definition)

    def body_text(self) -> str:
        if isinstance(self.body, Definition):
            return print_definition(self.body)
        return print_formula(self.body)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "body": to_json(self.body),
            "premises": list(self.premises),
            "source_text": self.source_text,
            "depth": self.depth,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Statement":
        return cls(data["id"], StatementKind(data["kind"]), from_json(data["body"]),
                   tuple(data.get("premises", ())), data.get("source_text"),
                   data.get("depth", 0))


@dataclass(frozen=True)
class Context:
    statements: tuple[Statement, ...] = ()
    problem_text: str = ""
    goal: Formula | None = None

    def __len__(self) -> int:
        return len(self.statements)

    def __iter__(self):
        return iter(self.statements)

    def __getitem__(self, sid: int) -> Statement:
        return self.statements[sid]

    @property
    def conclusions(self) -> list[Statement]:
        return [s for s in self.statements if s.kind is StatementKind.CONCLUSION]

    def definitions(self) -> dict[str, Statement]:
        """Function name to the (first) Definition statement introducing it."""
        out: dict[str, Statement] = {}
        for s in self.statements:
            if isinstance(s.body, Definition):
                out.setdefault(s.body.name, s)
        return out

    def to_json(self) -> dict:
        return {
            "problem_text": self.problem_text,
            "goal": to_json(self.goal) if self.goal is not None else None,
            "statements": [s.to_json() for s in self.statements],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Context":
        goal = data.get("goal")
        return cls(tuple(Statement.from_json(s) for s in data.get("statements", ())),
                   data.get("problem_text", ""),
                   from_json(goal) if goal is not None else None)


@dataclass(frozen=True)
class Diagnostic:
    severity: str          # "error" or "lint"
    rule: str
    statement_id: int | None
    message: str

    def to_json(self) -> dict:
        return {"severity": self.severity, "rule": self.rule,
                "statement_id": self.statement_id, "message": self.message}

    def __str__(self) -> str:
        where = f"statement {self.statement_id}" if self.statement_id is not None else "context"
        return f"{self.severity}: {where}: [{self.rule}] {self.message}"


# -- parsing -----------------------------------------------------------------------

_HEAD = re.compile(r"^\s*(\d+)\s*\|")
_LINE = re.compile(
    r"^\s*(?P<id>\d+)\s*\|(?P<bars>(?:\s*\|)*)\s*(?P<kind>[A-Za-z]+)\s*"
    r"(?:\[(?P<premises>[^\]]*)\])?\s*:(?P<rest>.*)$")


@dataclass
class _Raw:
    line: int
    sid: int
    depth: int
    kind: str
    premises: str | None
    rest: str


def _split_raw(text: str) -> tuple[list[_Raw], list[str], list[str]]:
    raws: list[_Raw] = []
    problem: list[str] = []
    goal: list[str] = []
    current: list[str] | None = None       # header directive being continued
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("@problem:"):
            problem.append(stripped[len("@problem:"):].strip())
            current = problem
            continue
        if stripped.startswith("@goal:"):
            goal.append(stripped[len("@goal:"):].strip())
            current = goal
            continue
        if _HEAD.match(line):
            m = _LINE.match(line)
            if m is None:
                raise ParseError("malformed statement line", lineno, 1,
                                 {"<id> | KIND[premises]: body"}, stripped[:20])
            raws.append(_Raw(lineno, int(m["id"]), m["bars"].count("|"), m["kind"],
                             m["premises"], m["rest"]))
            current = None
            continue
        if raws and current is None:
            raws[-1].rest += " " + stripped
        elif current is not None:
            current.append(stripped)
        else:
            raise ParseError("text before the first statement", lineno, 1,
                             {"<id> |", "@problem:", "@goal:"}, stripped[:20])
    return raws, problem, goal


def _relocate(err: ParseError, line: int, offset: int) -> ParseError:
    column = err.column + offset if err.line == 1 else err.column
    moved = ParseError(err.message, line + err.line - 1, column, err.expected, err.token)
    return moved


def _parse_statement(raw: _Raw) -> Statement:
    try:
        kind = StatementKind.parse(raw.kind)
    except ValueError:
        raise ParseError("unknown statement kind", raw.line, 1,
                         {k.value.upper() for k in StatementKind}, raw.kind) from None
    premises: tuple[int, ...] = ()
    if raw.premises is not None and raw.premises.strip():
        try:
            premises = tuple(int(p) for p in raw.premises.replace(",", " ").split())
        except ValueError:
            raise ParseError("premise list must contain integer ids", raw.line, 1,
                             {"integer"}, raw.premises) from None
    body_text, _, source = raw.rest.partition("//")
    body_text = body_text.strip()
    offset = len(raw.rest) - len(raw.rest.lstrip())
    try:
        if body_text.startswith("definition"):
            body: Body = parse_definition(body_text)
        else:
            body = parse_formula(body_text)
    except ParseError as err:
        raise _relocate(err, raw.line, offset) from None
    return Statement(raw.sid, kind, body, premises, source.strip() or None, raw.depth)


_RAISES = {
    "missing-reference": PremiseReferenceError,
    "forward-reference": PremiseReferenceError,
    "nesting": NestingError,
}


def parse_context(text: str, strict: bool = True) -> Context:
    """Parse the line-oriented context format.

    With ``strict`` (the default) the first structural error found by
    :func:`validate_context` is raised as a :class:`ContextError` subclass;
    otherwise the context is returned as written so it can be linted.
    """
    raws, problem, goal = _split_raw(text)
    statements = tuple(_parse_statement(r) for r in raws)
    goal_formula = None
    if goal:
        try:
            goal_formula = parse_formula(" ".join(goal))
        except ParseError as err:
            raise ParseError(f"in @goal: {err.message}", err.line, err.column,
                             err.expected, err.token) from None
    ctx = Context(statements, "\n".join(problem), goal_formula)
    if strict:
        for d in validate_context(ctx):
            if d.severity == "error":
                cls = _RAISES.get(d.rule, StructureError)
                raise cls(d.message, d.statement_id, d.rule)
    return ctx


def print_context(ctx: Context) -> str:
    lines = [f"@problem: {line}" for line in ctx.problem_text.splitlines()]
    if ctx.goal is not None:
        lines.append(f"@goal: {print_formula(ctx.goal)}")
    for s in ctx.statements:
        kind = s.kind.value.upper()
        if s.premises:
            kind += "[" + ", ".join(str(p) for p in s.premises) + "]"
        line = f"{s.id} | {'| ' * s.depth}{kind}: {s.body_text()}"
        if s.source_text:
            line += " // " + " ".join(s.source_text.split())
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- scoping ---------------------------------------------------------------------------


def scopes(ctx: Context) -> tuple[list[tuple[int, ...]], list[Diagnostic]]:
    """Open-assumption chain after each statement, plus nesting diagnostics.

    An Assumption at depth ``d`` closes every box at depth >= ``d`` and opens
    a new box; any other statement may stay at the current depth or close
    boxes, but never go deeper.
    """
    stack: list[int] = []
    out: list[tuple[int, ...]] = []
    diags: list[Diagnostic] = []
    for s in ctx.statements:
        limit = len(stack) + (1 if s.kind is StatementKind.ASSUMPTION else 0)
        if s.kind is StatementKind.ASSUMPTION and s.depth < 1:
            diags.append(Diagnostic("error", "nesting", s.id,
                                    "an assumption must open a box (depth >= 1)"))
        elif s.depth > limit:
            diags.append(Diagnostic("error", "nesting", s.id,
                                    f"depth {s.depth} jumps past the open depth {len(stack)}"))
        depth = min(max(s.depth, 0), limit)
        if s.kind is StatementKind.ASSUMPTION:
            depth = max(depth, 1)
            del stack[depth - 1:]
            stack.append(s.id)
        else:
            del stack[depth:]
        out.append(tuple(stack))
    return out, diags


def _is_prefix(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return b[:len(a)] == a


def _check_citations(ctx: Context, s: Statement, chain: list[tuple[int, ...]],
                     known: set[int]) -> list[Diagnostic]:
    mine = chain[s.id]
    hidden = [p for p in s.premises if p in known and p < s.id
              and not _is_prefix(chain[p], mine)]
    if not hidden:
        return []
    depth = len(mine)
    boxes = {chain[p][depth] if len(chain[p]) > depth and _is_prefix(mine, chain[p]) else None
             for p in hidden}
    if len(boxes) == 1 and None not in boxes:
        (opener,) = boxes
        a = ctx.statements[opener]
        if (chain[opener] == mine + (opener,) and opener in s.premises
                and isinstance(s.body, Implies) and not isinstance(a.body, Definition)
                and s.body.left == a.body):
            return []
        return [Diagnostic("error", "scope", s.id,
                           f"citing inside the closed box of statement {opener} requires "
                           f"citing that assumption and concluding an implication from it")]
    shown = ", ".join(str(p) for p in hidden)
    return [Diagnostic("error", "scope", s.id,
                       f"premise(s) {shown} are not in scope")]


# -- validation ------------------------------------------------------------------------


def validate_context(ctx: Context) -> list[Diagnostic]:
    """Structural diagnostics; empty exactly when every invariant holds."""
    diags: list[Diagnostic] = []
    for pos, s in enumerate(ctx.statements):
        if s.id != pos:
            diags.append(Diagnostic("error", "id-sequence", s.id,
                                    f"expected id {pos}, found {s.id}"))
    if any(d.rule == "id-sequence" for d in diags):
        return diags        # the remaining rules index statements by id

    chain, nesting = scopes(ctx)
    diags.extend(nesting)
    known = set(range(len(ctx)))
    arities: dict[str, tuple[int, int]] = {}
    defined: dict[str, int] = {}
    for s in ctx.statements:
        for p in s.premises:
            if p not in known:
                diags.append(Diagnostic("error", "missing-reference", s.id,
                                        f"premise {p} does not exist"))
            elif p >= s.id:
                diags.append(Diagnostic("error", "forward-reference", s.id,
                                        f"premise {p} is not earlier than {s.id}"))
        if s.kind is StatementKind.CONCLUSION and not s.premises:
            diags.append(Diagnostic("error", "kind-premise-mismatch", s.id,
                                    "a conclusion must cite its premises"))
        elif s.kind is not StatementKind.CONCLUSION and s.premises:
            diags.append(Diagnostic("error", "kind-premise-mismatch", s.id,
                                    f"a {s.kind.value} cannot cite premises"))
        if (s.kind is StatementKind.DEFINITION) != isinstance(s.body, Definition):
            diags.append(Diagnostic("error", "definition-kind", s.id,
                                    "definition bodies go exactly with the DEFINITION kind"))
        if isinstance(s.body, Definition):
            name = s.body.name
            if name in defined:
                diags.append(Diagnostic("error", "duplicate-definition", s.id,
                                        f"{name} is already defined by statement {defined[name]}"))
            else:
                defined[name] = s.id
        for name, arity in sorted(functions_used(s.body)):
            first = arities.setdefault(name, (arity, s.id))
            if first[0] != arity:
                diags.append(Diagnostic("error", "arity", s.id,
                                        f"{name} used with {arity} argument(s), but with "
                                        f"{first[0]} at statement {first[1]}"))
        diags.extend(_check_citations(ctx, s, chain, known))
        if len(s.premises) > MAX_PREMISES:
            diags.append(Diagnostic("lint", "premise-width", s.id,
                                    f"{len(s.premises)} premises (more than {MAX_PREMISES} is unusual)"))
    if ctx.goal is not None and ctx.conclusions:
        last = ctx.conclusions[-1]
        if isinstance(last.body, Definition) or \
                ac_normalize(last.body) != ac_normalize(ctx.goal):
            diags.append(Diagnostic("lint", "goal-mismatch", last.id,
                                    "the final conclusion differs from the stated goal"))
    return diags


def errors_only(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


__all__ = [
    "Context", "ContextError", "Diagnostic", "Statement", "StatementKind",
    "errors_only", "parse_context", "print_context", "scopes", "validate_context",
]
