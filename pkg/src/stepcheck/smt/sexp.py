"""Just enough S-expression handling to read solver responses and models."""

from __future__ import annotations

from fractions import Fraction
from typing import Union

SExp = Union[str, list]


class SExpError(ValueError):
    pass


def complete_prefix(text: str) -> int | None:
    """Length of the first complete S-expression in ``text``, or None if unfinished.

    An atom counts as complete only once followed by whitespace, so a
    partially received ``unknown`` is not mistaken for ``unk``.
    """
    i, n = 0, len(text)
    while i < n and text[i].isspace():
        i += 1
    if i == n:
        return None
    if text[i] != "(":
        j = i
        while j < n and not text[j].isspace() and text[j] not in "()":
            j += 1
        return j if j < n else None
    depth = 0
    while i < n:
        c = text[i]
        if c == '"':
            i += 1
            while i < n:
                if text[i] == '"':
                    if i + 1 < n and text[i + 1] == '"':   # escaped quote
                        i += 2
                        continue
                    break
                i += 1
        elif c == "|":
            i += 1
            while i < n and text[i] != "|":
                i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return None


def parse(text: str) -> SExp:
    tokens = _tokens(text)
    value, pos = _read(tokens, 0)
    return value


def _tokens(text: str) -> list[str]:
    out, i, n = [], 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append(c)
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            out.append(text[i:j + 1])
            i = j + 1
        elif c == "|":
            j = text.index("|", i + 1)
            out.append(text[i + 1:j])
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()";':
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _read(tokens: list[str], pos: int) -> tuple[SExp, int]:
    if pos >= len(tokens):
        raise SExpError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise SExpError("unbalanced parentheses")
        return items, pos + 1
    if tok == ")":
        raise SExpError("unexpected ')'")
    return tok, pos + 1


def render(e: SExp) -> str:
    if isinstance(e, list):
        return "(" + " ".join(render(x) for x in e) + ")"
    return e


# -- model values --------------------------------------------------------------------


def _numeral(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except ValueError:
        raise SExpError(f"not a numeral: {tok}") from None


class ModelEvaluator:
    """Evaluate the ground arithmetic/ite fragment solvers print in models."""

    def __init__(self, functions: dict[str, tuple[list[str], SExp]] | None = None):
        self.functions = functions or {}

    def value(self, e: SExp, env: dict[str, Fraction | bool] | None = None):
        env = env or {}
        if isinstance(e, str):
            if e in env:
                return env[e]
            if e == "true":
                return True
            if e == "false":
                return False
            if e in self.functions and not self.functions[e][0]:
                return self.value(self.functions[e][1], {})
            return _numeral(e)
        if not e:
            raise SExpError("empty application")
        head, args = e[0], e[1:]
        if head == "let":
            local = dict(env)
            for name, bound in args[0]:
                local[name] = self.value(bound, env)
            return self.value(args[1], local)
        if head == "ite":
            return self.value(args[1] if self.value(args[0], env) else args[2], env)
        if isinstance(head, list):
            if head[:1] == ["_", "as-array"] or head[:1] == ["as"]:
                raise SExpError("array values are not supported")
            raise SExpError(f"unsupported head {render(head)}")
        vals = [self.value(a, env) for a in args]
        if head == "-":
            return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
        if head == "+":
            return sum(vals, Fraction(0))
        if head == "*":
            out = Fraction(1)
            for v in vals:
                out *= v
            return out
        if head == "/":
            if vals[1] == 0:
                raise SExpError("division by zero in model")
            return Fraction(vals[0]) / vals[1]
        if head in ("to_real", "to_int"):
            return vals[0] if head == "to_real" else Fraction(vals[0].__floor__())
        if head == "is_int":
            return vals[0].denominator == 1
        if head == "=":
            return all(v == vals[0] for v in vals[1:])
        if head == "distinct":
            return len(set(vals)) == len(vals)
        if head in ("<", "<=", ">", ">="):
            pairs = zip(vals, vals[1:])
            ops = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b,
                   ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}
            return all(ops[head](a, b) for a, b in pairs)
        if head == "and":
            return all(vals)
        if head == "or":
            return any(vals)
        if head == "not":
            return not vals[0]
        if head == "=>":
            return (not vals[0]) or vals[1]
        if head in self.functions:
            params, body = self.functions[head]
            return self.value(body, dict(zip(params, vals)))
        raise SExpError(f"unsupported operator {head}")


def parse_model(text: str) -> dict[str, tuple[list[str], SExp]]:
    """``(model (define-fun name ((p S) ...) S body) ...)`` into name -> (params, body)."""
    e = parse(text)
    if not isinstance(e, list):
        raise SExpError("model is not a list")
    if e and e[0] == "model":
        e = e[1:]
    out = {}
    for item in e:
        if isinstance(item, list) and len(item) == 5 and item[0] == "define-fun":
            _, name, params, _sort, body = item
            out[name] = ([p[0] for p in params], body)
    return out
