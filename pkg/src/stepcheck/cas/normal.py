"""Canonical rational-function normal form for algebraic terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DivisionByZero, UnsupportedTerm
from ..lang.ast import (
    Add, App, Div, Mul, Neg, Num, Pow, Sub, Term, Var,
)
from ..lang.printer import print_term
from .poly import ONE, Poly, exact_div, gcd


@dataclass(frozen=True, eq=False)
class PolyNormalForm:
    """``num / den`` in lowest terms with a monic denominator.

    ``atoms`` maps opaque atom keys (function applications, powers with a
    symbolic exponent) back to the terms they stand for; it is bookkeeping
    and does not take part in equality.
    """

    num: Poly
    den: Poly = ONE
    atoms: dict[str, Term] = field(default_factory=dict)

    @classmethod
    def make(cls, num: Poly, den: Poly, atoms: dict[str, Term]) -> "PolyNormalForm":
        if den.is_zero():
            raise DivisionByZero("denominator", "denominator is the zero polynomial")
        if num.is_zero():
            return cls(num, ONE, atoms)
        if not den.is_const():
            g = gcd(num, den)
            if not g.is_const():
                num, den = exact_div(num, g), exact_div(den, g)
        _, lc = den.leading()
        return cls(num.scale(1 / lc), den.scale(1 / lc), atoms)

    @classmethod
    def const(cls, c: Fraction) -> "PolyNormalForm":
        return cls(Poly.const(c))

    def _merge(self, other: "PolyNormalForm") -> dict[str, Term]:
        if not other.atoms:
            return self.atoms
        return {**self.atoms, **other.atoms}

    def __add__(self, other):
        if self.den == other.den:
            return self.make(self.num + other.num, self.den, self._merge(other))
        return self.make(self.num * other.den + other.num * self.den,
                         self.den * other.den, self._merge(other))

    def __neg__(self):
        return PolyNormalForm(-self.num, self.den, self.atoms)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return self.make(self.num * other.num, self.den * other.den, self._merge(other))

    def __truediv__(self, other):
        if other.num.is_zero():
            raise DivisionByZero("divisor", "division by the zero polynomial")
        return self.make(self.num * other.den, self.den * other.num, self._merge(other))

    def __pow__(self, k: int):
        if k >= 0:
            return PolyNormalForm(self.num ** k, self.den ** k, self.atoms) if k != 1 else self
        if self.num.is_zero():
            raise DivisionByZero("power", "zero raised to a negative power")
        return self.make(self.den ** -k, self.num ** -k, self.atoms)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyNormalForm) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def is_polynomial(self) -> bool:
        return self.den == ONE

    def opaque_atoms(self) -> set[str]:
        return (self.num.atoms() | self.den.atoms()) & set(self.atoms)

    def variables(self) -> set[str]:
        return (self.num.atoms() | self.den.atoms()) - set(self.atoms)

    def evaluate(self, values) -> Fraction:
        den = self.den.evaluate(values)
        if den == 0:
            raise DivisionByZero("denominator")
        return self.num.evaluate(values) / den

    def to_json(self) -> dict:
        return {"num": _poly_json(self.num), "den": _poly_json(self.den)}


def _poly_json(p: Poly) -> list:
    return [[[list(pair) for pair in m], str(c)] for m, c in sorted(p.terms.items())]


class _Normalizer:
    def __init__(self):
        self.atoms: dict[str, Term] = {}

    def run(self, t: Term) -> PolyNormalForm:
        if isinstance(t, Num):
            return PolyNormalForm.const(t.value)
        if isinstance(t, Var):
            return PolyNormalForm(Poly.atom(t.name))
        if isinstance(t, Neg):
            return -self.run(t.arg)
        if isinstance(t, Add):
            return self.run(t.left) + self.run(t.right)
        if isinstance(t, Sub):
            return self.run(t.left) - self.run(t.right)
        if isinstance(t, Mul):
            return self.run(t.left) * self.run(t.right)
        if isinstance(t, Div):
            den = self.run(t.right)
            if den.num.is_zero():
                raise DivisionByZero(t)
            return self.run(t.left) / den
        if isinstance(t, Pow):
            exp = t.exp
            if isinstance(exp, Var):
                base = to_term(self.run(t.base))
                return self._opaque(Pow(base, exp))
            k = self.run(exp)
            if not k.num.is_const() or not k.den.is_const():
                raise UnsupportedTerm(f"symbolic exponent {print_term(exp)}")
            value = k.num.const_value()
            if value.denominator != 1:
                raise UnsupportedTerm(f"non-integer exponent {value}")
            return self.run(t.base) ** int(value)
        if isinstance(t, App):
            args = tuple(to_term(self.run(a)) for a in t.args)
            return self._opaque(App(t.func, args))
        raise UnsupportedTerm(f"not an algebraic term: {t!r}")

    def _opaque(self, t: Term) -> PolyNormalForm:
        key = print_term(t)
        self.atoms[key] = t
        return PolyNormalForm(Poly.atom(key), ONE, {key: t})


def normalize(t: Term) -> PolyNormalForm:
    """Canonical form: equal results iff the terms denote the same rational function.

    Function applications and powers with a variable exponent become opaque
    atoms (keyed by their printed, argument-normalized form).
    """
    nf = _Normalizer().run(t)
    return nf


def _monomial_term(mono, atoms: dict[str, Term]) -> Term | None:
    out: Term | None = None
    for atom, e in mono:
        base = atoms.get(atom, Var(atom))
        factor = base if e == 1 else Pow(base, Num(e))
        out = factor if out is None else Mul(out, factor)
    return out


def poly_to_term(p: Poly, atoms: dict[str, Term]) -> Term:
    if p.is_zero():
        return Num(0)
    order = sorted(p.atoms())

    def sort_key(item):
        mono, _ = item
        exps = dict(mono)
        return (-sum(exps.values()), tuple(-exps.get(a, 0) for a in order))

    out: Term | None = None
    for mono, c in sorted(p.terms.items(), key=sort_key):
        body = _monomial_term(mono, atoms)
        mag = abs(c)
        if body is None:
            piece: Term = Num(mag)
        elif mag == 1:
            piece = body
        else:
            piece = Mul(Num(mag), body)
        if out is None:
            out = piece if c > 0 else Neg(piece)
        else:
            out = Add(out, piece) if c > 0 else Sub(out, piece)
    return out


def to_term(nf: PolyNormalForm) -> Term:
    num = poly_to_term(nf.num, nf.atoms)
    if nf.den == ONE:
        return num
    return Div(num, poly_to_term(nf.den, nf.atoms))
