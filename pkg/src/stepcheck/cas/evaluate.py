"""Exact rational evaluation of terms and quantifier-free formulas."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Union

from ..errors import (
    DivisionByZero, EvaluationError, NonIntegerExponent, OutsideDomain,
    UnboundVariable, UnsupportedTerm,
)
from ..lang.ast import (
    Add, And, App, Bool, Definition, Div, Exists, Forall, Formula, Implies,
    Member, Mul, Neg, Not, Num, Or, Pow, Rel, Sort, Sub, Term, Var,
)

# A function symbol is interpreted by a Definition (unfolded by branch
# dispatch), a finite table of point values, or a Python callable.
FunctionImpl = Union[Definition, Mapping[tuple, Fraction], Callable[..., Fraction]]

MAX_EXPONENT = 4096
MAX_DEPTH = 600


def in_sort(value: Fraction, sort: Sort) -> bool:
    if sort is Sort.NAT:
        return value.denominator == 1 and value >= 0
    if sort is Sort.INT:
        return value.denominator == 1
    return True   # every exact value here is rational, hence real


class Evaluator:
    def __init__(self, env: Mapping[str, Fraction] | None = None,
                 functions: Mapping[str, FunctionImpl] | None = None):
        self.env = {k: Fraction(v) for k, v in (env or {}).items()}
        self.functions = dict(functions or {})
        self._memo: dict[tuple, Fraction] = {}
        self._depth = 0
        self.calls: dict[tuple, Fraction] = {}   # every application evaluated

    def term(self, t: Term, env: Mapping[str, Fraction] | None = None) -> Fraction:
        env = self.env if env is None else env
        if isinstance(t, Num):
            return t.value
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise UnboundVariable(t.name) from None
        if isinstance(t, Neg):
            return -self.term(t.arg, env)
        if isinstance(t, Add):
            return self.term(t.left, env) + self.term(t.right, env)
        if isinstance(t, Sub):
            return self.term(t.left, env) - self.term(t.right, env)
        if isinstance(t, Mul):
            return self.term(t.left, env) * self.term(t.right, env)
        if isinstance(t, Div):
            num = self.term(t.left, env)
            den = self.term(t.right, env)
            if den == 0:
                raise DivisionByZero(t)
            return num / den
        if isinstance(t, Pow):
            base = self.term(t.base, env)
            exp = self.term(t.exp, env)
            if exp.denominator != 1:
                raise NonIntegerExponent(f"exponent {exp} is not an integer")
            if abs(exp) > MAX_EXPONENT:
                raise EvaluationError(f"exponent {exp} too large")
            if base == 0 and exp < 0:
                raise DivisionByZero(t)
            return base ** int(exp)
        if isinstance(t, App):
            args = tuple(self.term(a, env) for a in t.args)
            value = self.apply(t.func, args)
            self.calls[(t.func, args)] = value
            return value
        raise UnsupportedTerm(f"not a term: {t!r}")

    def apply(self, name: str, args: tuple[Fraction, ...]) -> Fraction:
        impl = self.functions.get(name)
        if impl is None:
            raise UnboundVariable(f"{name}/{len(args)}")
        if isinstance(impl, Definition):
            return self._unfold(impl, args)
        if callable(impl) and not isinstance(impl, Mapping):
            return Fraction(impl(*args))
        try:
            return Fraction(impl[args])
        except KeyError:
            shown = ", ".join(str(a) for a in args)
            raise UnboundVariable(f"{name}({shown})") from None

    def _unfold(self, d: Definition, args: tuple[Fraction, ...]) -> Fraction:
        key = (d.name, args)
        if key in self._memo:
            return self._memo[key]
        if len(args) != d.arity:
            raise OutsideDomain(f"{d.name} expects {d.arity} argument(s)")
        for a, s in zip(args, d.arg_sorts):
            if not in_sort(a, s):
                raise OutsideDomain(f"{d.name} is not defined at {a} (outside {s.value})")
        if self._depth > MAX_DEPTH:
            raise EvaluationError(f"recursion too deep while unfolding {d.name}")
        local = dict(zip(d.params, args))
        self._depth += 1
        try:
            for branch in d.branches:
                if self.formula(branch.guard, local):
                    value = self.term(branch.body, local)
                    break
            else:
                shown = ", ".join(str(a) for a in args)
                raise OutsideDomain(f"no branch of {d.name} applies at ({shown})")
        finally:
            self._depth -= 1
        self._memo[key] = value
        return value

    def formula(self, f: Formula, env: Mapping[str, Fraction] | None = None) -> bool:
        env = self.env if env is None else env
        if isinstance(f, Rel):
            a, b = self.term(f.left, env), self.term(f.right, env)
            return _compare(f.op, a, b)
        if isinstance(f, Member):
            return in_sort(self.term(f.term, env), f.sort)
        if isinstance(f, Bool):
            return f.value
        if isinstance(f, Not):
            return not self.formula(f.arg, env)
        if isinstance(f, And):
            return self.formula(f.left, env) and self.formula(f.right, env)
        if isinstance(f, Or):
            return self.formula(f.left, env) or self.formula(f.right, env)
        if isinstance(f, Implies):
            return (not self.formula(f.left, env)) or self.formula(f.right, env)
        if isinstance(f, (Forall, Exists)):
            raise UnsupportedTerm("quantified formulas cannot be evaluated exactly")
        raise UnsupportedTerm(f"not a formula: {f!r}")


def _compare(op: str, a: Fraction, b: Fraction) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def eval_exact(t: Term, env: Mapping[str, Fraction] | None = None,
               functions: Mapping[str, FunctionImpl] | None = None) -> Fraction:
    """Exact value of ``t`` with variables from ``env``.

    ``functions`` interprets function symbols; a Definition is unfolded by
    dispatching on its guards, e.g. ``f(n-1) + f(n-2)`` at ``n = 4``.
    """
    return Evaluator(env, functions).term(t)


def holds(f: Formula, env: Mapping[str, Fraction] | None = None,
          functions: Mapping[str, FunctionImpl] | None = None) -> bool:
    return Evaluator(env, functions).formula(f)
