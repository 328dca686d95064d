"""Tokenizer and recursive-descent parser for SimpleMath.

Precedence, tightest first::

    ^   (right, exponent restricted)     unary -     * /     + -
    = != < <= > >= in                    ~           /\\      \\/      ->  (right)

Quantifiers (``forall x, ...`` / ``exists x in ZZ, ...``) extend as far to
the right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ArityError, ParseError
from .ast import (
    Add, And, App, Bool, Branch, Definition, Div, Exists, Forall, Formula,
    Implies, Member, Mul, Neg, Not, Num, Or, Pow, Rel, Sort, Sub, Term, TRUE,
    Var, conjuncts,
)

KEYWORDS = {"forall", "exists", "in", "true", "false", "definition", "if",
            "NN", "ZZ", "QQ", "RR"}
SORT_WORDS = {"NN", "ZZ", "QQ", "RR"}
RELOPS = {"=", "!=", "<", "<=", ">", ">="}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>:=|->|/\\|\\/|<=|>=|!=|[=<>+\-*/^(),:|;~])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str   # "num", "ident", "kw", "sym", "eof"
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else self.text


def tokenize(text: str, line_offset: int = 0) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1 + line_offset, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", line, pos - line_start + 1,
                             token=text[pos])
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _literal(text: str) -> Fraction:
    return Fraction(text)   # exact for both "12" and "0.25"


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self._far_pos = -1
        self._far_expected: set[str] = set()
        self._paren_memo: dict[int, tuple[Formula, int] | None] = {}

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text in texts

    def fail(self, *expected: str) -> ParseError:
        if self.pos > self._far_pos:
            self._far_pos, self._far_expected = self.pos, set(expected)
        elif self.pos == self._far_pos:
            self._far_expected |= set(expected)
        t = self.tokens[self._far_pos]
        return ParseError("unexpected token", t.line, t.column,
                          self._far_expected, t.describe())

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(repr(text))
        t = self.tok
        self.pos += 1
        return t

    def expect_ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.fail("identifier")
        name = self.tok.text
        self.pos += 1
        return name

    def expect_sort(self) -> Sort:
        if self.tok.kind == "kw" and self.tok.text in SORT_WORDS:
            s = Sort.from_keyword(self.tok.text)
            self.pos += 1
            return s
        raise self.fail("sort (NN, ZZ, QQ, RR)")

    def finish(self):
        if self.tok.kind != "eof":
            raise self.fail("end of input")

    # -- formulas ---------------------------------------------------------------

    def formula(self) -> Formula:
        if self.at("forall", "exists"):
            return self.quantifier()
        left = self.disjunction()
        if self.at("->"):
            self.pos += 1
            return Implies(left, self.formula())
        return left

    def quantifier(self) -> Formula:
        which = self.tok.text
        self.pos += 1
        var = self.expect_ident()
        sort = None
        if self.at("in"):
            self.pos += 1
            sort = self.expect_sort()
        self.expect(",")
        body = self.formula()
        if sort is None:
            sort = implied_sort(var, body)
        return (Forall if which == "forall" else Exists)(var, sort, body)

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("\\/"):
            self.pos += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary_formula()
        while self.at("/\\"):
            self.pos += 1
            left = And(left, self.unary_formula())
        return left

    def unary_formula(self) -> Formula:
        if self.at("~"):
            self.pos += 1
            return Not(self.unary_formula())
        if self.at("forall", "exists"):
            return self.quantifier()
        return self.atom()

    def atom(self) -> Formula:
        if self.at("true", "false"):
            value = self.tok.text == "true"
            self.pos += 1
            return Bool(value)
        if self.at("("):
            hit = self._paren_formula()
            if hit is not None:
                return hit
        left = self.term()
        if self.at("in"):
            self.pos += 1
            return Member(left, self.expect_sort())
        if self.tok.kind == "sym" and self.tok.text in RELOPS:
            op = self.tok.text
            self.pos += 1
            return Rel(op, left, self.term())
        raise self.fail("relation", "'in'")

    def _paren_formula(self) -> Formula | None:
        """Try ``( formula )`` here; ``None`` means reparse as a term."""
        start = self.pos
        if start in self._paren_memo:
            memo = self._paren_memo[start]
            if memo is None:
                return None
            self.pos = memo[1]
            return memo[0]
        try:
            self.pos += 1
            inner = self.formula()
            self.expect(")")
        except ParseError:
            self.pos = start
            self._paren_memo[start] = None
            return None
        # "(a) + 1 = b" style continuations mean it was a term after all
        if self.tok.kind == "sym" and self.tok.text in RELOPS | {"+", "-", "*", "/", "^"} \
                or self.at("in"):
            self.pos = start
            self._paren_memo[start] = None
            return None
        self._paren_memo[start] = (inner, self.pos)
        return inner

    # -- terms ------------------------------------------------------------------

    def term(self) -> Term:
        left = self.product()
        while self.at("+", "-"):
            op = self.tok.text
            self.pos += 1
            right = self.product()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def product(self) -> Term:
        left = self.unary_term()
        while self.at("*", "/"):
            op = self.tok.text
            self.pos += 1
            right = self.unary_term()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary_term(self) -> Term:
        if self.at("-"):
            self.pos += 1
            return Neg(self.unary_term())
        return self.power()

    def power(self) -> Term:
        base = self.primary()
        if self.at("^"):
            self.pos += 1
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> Term:
        parens = self.at("(")
        if parens:
            self.pos += 1
        negate = self.at("-")
        if negate:
            self.pos += 1
        t = self.tok
        if t.kind == "num" and "." not in t.text:
            self.pos += 1
            exp: Term = Num(Fraction(int(t.text)))
            if negate:
                exp = Neg(exp)
        elif t.kind == "ident" and not negate:
            self.pos += 1
            exp = Var(t.text)
        else:
            raise self.fail("integer literal", "identifier")
        if parens:
            self.expect(")")
        if self.at("^"):
            raise self.fail("exponent must be an integer literal or variable")
        return exp

    def primary(self) -> Term:
        t = self.tok
        if t.kind == "num":
            self.pos += 1
            return Num(_literal(t.text))
        if t.kind == "ident":
            self.pos += 1
            if self.at("("):
                self.pos += 1
                args = [self.term()]
                while self.at(","):
                    self.pos += 1
                    args.append(self.term())
                self.expect(")")
                return App(t.text, tuple(args))
            return Var(t.text)
        if self.at("("):
            self.pos += 1
            inner = self.term()
            self.expect(")")
            return inner
        raise self.fail("number", "identifier", "'('", "'-'")

    # -- definitions ----------------------------------------------------------------

    def definition(self) -> Definition:
        self.expect("definition")
        self.expect("(")
        name = self.expect_ident()
        self.expect(")")
        self.expect(":")
        arg_sorts = [self.expect_sort()]
        while self.at(",", "*"):
            self.pos += 1
            arg_sorts.append(self.expect_sort())
        self.expect("->")
        result = self.expect_sort()

        params: tuple[str, ...] | None = None
        branches: list[Branch] = []
        while True:
            head = self._branch_head(name)
            if head is not None:
                if params is None:
                    params = head
                elif len(head) != len(params):
                    t = self.tok
                    raise ArityError(f"branch of {name} has {len(head)} parameter(s), "
                                     f"expected {len(params)}", t.line, t.column)
            elif params is None:
                raise self.fail(f"'{name}('")
            body = self.term()
            if self.at(","):
                self.pos += 1
            guard = TRUE
            if self.at("if"):
                self.pos += 1
                guard = self.formula()
            if self.at(";"):
                self.pos += 1
            if head is not None and head != params:
                from .transform import substitute, substitute_term
                for old, new in zip(head, params):
                    body = substitute_term(body, old, Var(new))
                    guard = substitute(guard, old, Var(new))
            branches.append(Branch(body, guard))
            if self.at("|"):
                self.pos += 1
                continue
            break
        if len(params) != len(arg_sorts):
            raise ArityError(f"{name} declares {len(arg_sorts)} argument sort(s) but "
                             f"takes {len(params)} parameter(s)", self.tok.line, self.tok.column)
        if len(set(params)) != len(params):
            raise ParseError(f"repeated parameter in definition of {name}",
                             self.tok.line, self.tok.column)
        return Definition(name, params, tuple(arg_sorts), result, tuple(branches))

    def _branch_head(self, name: str) -> tuple[str, ...] | None:
        """Consume an optional ``name(p1, ..., pk) :=`` prefix."""
        if not (self.tok.kind == "ident" and self.tok.text == name):
            return None
        start = self.pos
        self.pos += 1
        if not self.at("("):
            self.pos = start
            return None
        self.pos += 1
        names = []
        while True:
            if self.tok.kind != "ident":
                self.pos = start
                return None
            names.append(self.tok.text)
            self.pos += 1
            if self.at(","):
                self.pos += 1
                continue
            break
        if not self.at(")"):
            self.pos = start
            return None
        self.pos += 1
        if not self.at(":="):
            # "f(n) ..." without := is an ordinary body term
            self.pos = start
            return None
        self.pos += 1
        return tuple(names)


def implied_sort(var: str, body: Formula) -> Sort:
    """Sort announced by a leading ``var in S -> ...`` antecedent, else Real."""
    if isinstance(body, Implies):
        for c in conjuncts(body.left):
            if isinstance(c, Member) and c.term == Var(var):
                return c.sort
    return Sort.REAL


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.finish()
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.finish()
    return t


def parse_definition(text: str) -> Definition:
    p = _Parser(text)
    d = p.definition()
    p.finish()
    return d
