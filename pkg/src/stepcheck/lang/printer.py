"""Pretty printer emitting the minimal parentheses the parser needs."""

from __future__ import annotations

from fractions import Fraction

from .ast import (
    Add, And, App, Bool, Definition, Div, Exists, Forall, Formula, Implies,
    Member, Mul, Neg, Not, Num, Or, Pow, Rel, Sub, Term, TRUE, Var,
)

# term levels: 1 additive, 2 multiplicative, 3 prefix minus, 4 power, 5 primary
_TERM_LEVEL = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_TERM_OP = {Add: "+", Sub: "-", Mul: "*", Div: "/"}

# formula levels: 0 quantifier, 1 ->, 2 \/, 3 /\, 4 ~, 5 atom
_FORMULA_LEVEL = {Forall: 0, Exists: 0, Implies: 1, Or: 2, And: 3, Not: 4}


def format_rational(q: Fraction) -> str:
    """Terminating decimals print as decimals; other fractions as ``(p/q)``."""
    if q.denominator == 1:
        text = str(q.numerator)
    else:
        d = q.denominator
        k = 0
        while d % 2 == 0:
            d //= 2
            k += 1
        m = 0
        while d % 5 == 0:
            d //= 5
            m += 1
        if d == 1:
            places = max(k, m)
            scaled = abs(q.numerator) * 10 ** places // q.denominator
            text = f"{scaled // 10 ** places}.{scaled % 10 ** places:0{places}d}"
            if q < 0:
                text = "-" + text
        else:
            return f"({q.numerator}/{q.denominator})"
    return f"({text})" if q < 0 else text


def _term_level(t: Term) -> int:
    if isinstance(t, Num) and t.value < 0:
        return 5
    return _TERM_LEVEL.get(type(t), 5)


def print_term(t: Term, min_level: int = 0) -> str:
    level = _term_level(t)
    if isinstance(t, Num):
        text = format_rational(t.value)
    elif isinstance(t, Var):
        text = t.name
    elif isinstance(t, App):
        text = f"{t.func}({', '.join(print_term(a) for a in t.args)})"
    elif isinstance(t, Neg):
        text = "-" + print_term(t.arg, 3)
    elif isinstance(t, Pow):
        exp = t.exp
        if isinstance(exp, Neg) and isinstance(exp.arg, Num):
            exp_text = "-" + format_rational(exp.arg.value)
        elif isinstance(exp, (Num, Var)):
            exp_text = print_term(exp, 5)
        else:
            exp_text = "(" + print_term(exp) + ")"   # not reparseable; best effort
        text = f"{print_term(t.base, 5)}^{exp_text}"
    else:
        op = _TERM_OP[type(t)]
        text = f"{print_term(t.left, level)} {op} {print_term(t.right, level + 1)}"
    if level < min_level:
        return f"({text})"
    return text


def print_formula(f: Formula, min_level: int = 0, tail: bool = True) -> str:
    if isinstance(f, (Forall, Exists)):
        level = 0
    else:
        level = _FORMULA_LEVEL.get(type(f), 5)
    needs_parens = level < min_level and not (level == 0 and tail)
    if needs_parens:
        min_level, tail = 0, True

    if isinstance(f, Rel):
        text = f"{print_term(f.left)} {f.op} {print_term(f.right)}"
    elif isinstance(f, Member):
        text = f"{print_term(f.term)} in {f.sort.value}"
    elif isinstance(f, Bool):
        text = "true" if f.value else "false"
    elif isinstance(f, Not):
        text = "~" + print_formula(f.arg, 4, tail)
    elif isinstance(f, And):
        text = f"{print_formula(f.left, 3, False)} /\\ {print_formula(f.right, 4, tail)}"
    elif isinstance(f, Or):
        text = f"{print_formula(f.left, 2, False)} \\/ {print_formula(f.right, 3, tail)}"
    elif isinstance(f, Implies):
        text = f"{print_formula(f.left, 2, False)} -> {print_formula(f.right, 1, tail)}"
    elif isinstance(f, (Forall, Exists)):
        from .parser import implied_sort

        word = "forall" if isinstance(f, Forall) else "exists"
        binder = f.var if implied_sort(f.var, f.body) == f.sort else f"{f.var} in {f.sort.value}"
        text = f"{word} {binder}, {print_formula(f.body, 0, True)}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if needs_parens else text


def print_definition(d: Definition) -> str:
    sig = ", ".join(s.value for s in d.arg_sorts) + f" -> {d.result_sort.value}"
    head = f"{d.name}({', '.join(d.params)}) :="
    parts = []
    for b in d.branches:
        piece = print_term(b.body)
        if b.guard != TRUE:
            piece += f", if {print_formula(b.guard)}"
        parts.append(piece)
    return f"definition({d.name}): {sig} {head} " + " | ".join(parts)


def pretty(node) -> str:
    if isinstance(node, Definition):
        return print_definition(node)
    if isinstance(node, (Rel, Member, Bool, Not, And, Or, Implies, Forall, Exists)):
        return print_formula(node)
    return print_term(node)
