"""Free variables, capture-checked substitution and other AST walks."""

from __future__ import annotations

from ..errors import CaptureError
from .ast import (
    And, App, Bool, Definition, Exists, Forall, Formula, Implies, Member, Neg,
    Not, Num, Or, Pow, Rel, Term, Var, conjuncts, disjuncts,
)


def term_free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Num):
        return set()
    if isinstance(t, App):
        out: set[str] = set()
        for a in t.args:
            out |= term_free_vars(a)
        return out
    if isinstance(t, Neg):
        return term_free_vars(t.arg)
    if isinstance(t, Pow):
        return term_free_vars(t.base) | term_free_vars(t.exp)
    return term_free_vars(t.left) | term_free_vars(t.right)


def free_variables(f: Formula | Term | Definition) -> set[str]:
    if isinstance(f, Definition):
        out: set[str] = set()
        for b in f.branches:
            out |= term_free_vars(b.body) | free_variables(b.guard)
        return out - set(f.params)
    if isinstance(f, (Rel,)):
        return term_free_vars(f.left) | term_free_vars(f.right)
    if isinstance(f, Member):
        return term_free_vars(f.term)
    if isinstance(f, Bool):
        return set()
    if isinstance(f, Not):
        return free_variables(f.arg)
    if isinstance(f, (And, Or, Implies)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_variables(f.body) - {f.var}
    return term_free_vars(f)


def substitute_term(t: Term, v: str, r: Term) -> Term:
    if isinstance(t, Var):
        return r if t.name == v else t
    if isinstance(t, Num):
        return t
    if isinstance(t, App):
        return App(t.func, tuple(substitute_term(a, v, r) for a in t.args))
    if isinstance(t, Neg):
        return Neg(substitute_term(t.arg, v, r))
    if isinstance(t, Pow):
        return Pow(substitute_term(t.base, v, r), substitute_term(t.exp, v, r))
    return type(t)(substitute_term(t.left, v, r), substitute_term(t.right, v, r))


def substitute(f: Formula, v: str, r: Term) -> Formula:
    """Replace the free occurrences of ``v`` in ``f`` by ``r``.

    Raises CaptureError when a binder of ``f`` would capture a free variable
    of ``r`` at an occurrence that actually gets replaced.
    """
    return _subst(f, v, r, term_free_vars(r))


def _subst(f: Formula, v: str, r: Term, r_free: set[str]) -> Formula:
    if isinstance(f, Rel):
        return Rel(f.op, substitute_term(f.left, v, r), substitute_term(f.right, v, r))
    if isinstance(f, Member):
        return Member(substitute_term(f.term, v, r), f.sort)
    if isinstance(f, Bool):
        return f
    if isinstance(f, Not):
        return Not(_subst(f.arg, v, r, r_free))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_subst(f.left, v, r, r_free), _subst(f.right, v, r, r_free))
    if isinstance(f, (Forall, Exists)):
        if f.var == v or v not in free_variables(f.body):
            return f
        if f.var in r_free:
            raise CaptureError(f"substituting for {v} would capture {f.var}")
        return type(f)(f.var, f.sort, _subst(f.body, v, r, r_free))
    raise TypeError(f"not a formula: {f!r}")


def substitute_many(f: Formula, mapping: dict[str, Term]) -> Formula:
    for v, r in mapping.items():
        f = substitute(f, v, r)
    return f


def term_functions(t: Term) -> set[tuple[str, int]]:
    if isinstance(t, App):
        out = {(t.func, len(t.args))}
        for a in t.args:
            out |= term_functions(a)
        return out
    if isinstance(t, (Num, Var)):
        return set()
    if isinstance(t, Neg):
        return term_functions(t.arg)
    if isinstance(t, Pow):
        return term_functions(t.base) | term_functions(t.exp)
    return term_functions(t.left) | term_functions(t.right)


def functions_used(f: Formula | Term | Definition) -> set[tuple[str, int]]:
    """Pairs ``(name, arity)`` of every function application inside ``f``."""
    if isinstance(f, Definition):
        out: set[tuple[str, int]] = set()
        for b in f.branches:
            out |= term_functions(b.body) | functions_used(b.guard)
        return out
    if isinstance(f, Rel):
        return term_functions(f.left) | term_functions(f.right)
    if isinstance(f, Member):
        return term_functions(f.term)
    if isinstance(f, Bool):
        return set()
    if isinstance(f, Not):
        return functions_used(f.arg)
    if isinstance(f, (And, Or, Implies)):
        return functions_used(f.left) | functions_used(f.right)
    if isinstance(f, (Forall, Exists)):
        return functions_used(f.body)
    return term_functions(f)


def has_quantifier(f: Formula) -> bool:
    if isinstance(f, (Forall, Exists)):
        return True
    if isinstance(f, Not):
        return has_quantifier(f.arg)
    if isinstance(f, (And, Or, Implies)):
        return has_quantifier(f.left) or has_quantifier(f.right)
    return False


def ac_normalize(f: Formula) -> Formula:
    """Canonical operand order for nested ``/\\`` and ``\\/`` chains.

    Operands are flattened, normalized recursively and sorted by their
    printed form, then rebuilt left-nested.
    """
    from .printer import print_formula

    if isinstance(f, (And, Or)):
        split = conjuncts if isinstance(f, And) else disjuncts
        parts = sorted((ac_normalize(p) for p in split(f)), key=print_formula)
        out = parts[0]
        for p in parts[1:]:
            out = type(f)(out, p)
        return out
    if isinstance(f, Not):
        return Not(ac_normalize(f.arg))
    if isinstance(f, Implies):
        return Implies(ac_normalize(f.left), ac_normalize(f.right))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, f.sort, ac_normalize(f.body))
    return f


def is_ground(t: Term) -> bool:
    return not term_free_vars(t)


__all__ = [
    "term_free_vars", "free_variables", "substitute_term", "substitute",
    "substitute_many", "functions_used", "term_functions", "has_quantifier",
    "ac_normalize", "is_ground",
]
