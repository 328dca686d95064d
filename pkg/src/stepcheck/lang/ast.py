"""Abstract syntax of SimpleMath: terms, formulas, sorts and definitions.

All nodes are frozen dataclasses, so structural equality and hashing come
for free and ASTs can be shared between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union


class Sort(enum.Enum):
    NAT = "NN"
    INT = "ZZ"
    RAT = "QQ"
    REAL = "RR"

    @property
    def rank(self) -> int:
        return _SORT_RANK[self]

    def join(self, other: "Sort") -> "Sort":
        """Smallest sort containing both (Nat < Int < Rat < Real)."""
        return self if self.rank >= other.rank else other

    def contains(self, other: "Sort") -> bool:
        return self.rank >= other.rank

    @classmethod
    def from_keyword(cls, word: str) -> "Sort":
        return cls(word)


_SORT_RANK = {Sort.NAT: 0, Sort.INT: 1, Sort.RAT: 2, Sort.REAL: 3}


# -- terms ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction

    def __post_init__(self):
        # Fraction already keeps lowest terms with a positive denominator.
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: tuple["Term", ...]

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Neg:
    arg: "Term"


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Sub:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Div:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Pow:
    """``base ^ exp``; the exponent is an integer literal (possibly negated) or a variable."""

    base: "Term"
    exp: "Term"


Term = Union[Num, Var, App, Neg, Add, Sub, Mul, Div, Pow]
BINARY_TERMS = (Add, Sub, Mul, Div)


def is_valid_exponent(t: Term) -> bool:
    if isinstance(t, Num):
        return t.value.denominator == 1
    if isinstance(t, Var):
        return True
    return isinstance(t, Neg) and isinstance(t.arg, Num) and t.arg.value.denominator == 1


# -- formulas ------------------------------------------------------------------

RELATIONS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Rel:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")


@dataclass(frozen=True)
class Member:
    term: Term
    sort: Sort


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: Sort
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: Sort
    body: "Formula"


Formula = Union[Rel, Member, Bool, Not, And, Or, Implies, Forall, Exists]
Quantifier = (Forall, Exists)
TRUE = Bool(True)
FALSE = Bool(False)


# -- definitions ---------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    body: Term
    guard: Formula = TRUE


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple[str, ...]
    arg_sorts: tuple[Sort, ...]
    result_sort: Sort
    branches: tuple[Branch, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for attr in ("params", "arg_sorts", "branches"):
            value = getattr(self, attr)
            if not isinstance(value, tuple):
                object.__setattr__(self, attr, tuple(value))

    @property
    def arity(self) -> int:
        return len(self.params)


Node = Union[Term, Formula, Definition]


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten a right- or left-nested conjunction into its operands."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def disjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return disjuncts(f.left) + disjuncts(f.right)
    return [f]


def conjoin(parts: list[Formula]) -> Formula:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjoin(parts: list[Formula]) -> Formula:
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out
