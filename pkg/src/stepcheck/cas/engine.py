"""Queries answered by the algebra kernel: equivalence, roots, derivatives."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from ..errors import (
    DegenerateEquation, DegreeTooHigh, DivisionByZero, EvaluationError,
    NotUnivariate, UnsupportedTerm,
)
from ..lang.ast import Pow, Sub, Term, Var
from ..lang.transform import term_free_vars, term_functions
from .evaluate import Evaluator
from .normal import PolyNormalForm, normalize, to_term
from .poly import ONE

SAMPLE_BUDGET = 200
SAMPLE_BOUND = 10 ** 6
_PROBE_VALUES = (0, 1, -1, 2, -2, 3, -3)


@dataclass(frozen=True)
class EquivVerdict:
    kind: str                                   # "equal", "not_equal", "unknown"
    witness: dict[str, Fraction] = field(default_factory=dict)
    left_value: Fraction | None = None
    right_value: Fraction | None = None
    interpretation: dict[str, Fraction] = field(default_factory=dict)
    reason: str = ""

    @property
    def equal(self) -> bool:
        return self.kind == "equal"

    @property
    def not_equal(self) -> bool:
        return self.kind == "not_equal"


class _RandomFunction:
    """A consistent random interpretation of an uninterpreted function symbol."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.table: dict[tuple, Fraction] = {}

    def __call__(self, *args):
        if args not in self.table:
            self.table[args] = Fraction(self.rng.randint(-50, 50))
        return self.table[args]


def _exponent_vars(t: Term) -> set[str]:
    if isinstance(t, Pow):
        inner = _exponent_vars(t.base)
        return inner | (term_free_vars(t.exp) if isinstance(t.exp, Var) else set())
    out: set[str] = set()
    for attr in ("arg", "left", "right"):
        child = getattr(t, attr, None)
        if child is not None:
            out |= _exponent_vars(child)
    for a in getattr(t, "args", ()):
        out |= _exponent_vars(a)
    return out


def sample_points(names: list[str], rng: random.Random, budget: int,
                  integer_names: set[str] = frozenset(),
                  bound: int = SAMPLE_BOUND):
    """Small uniform probes first, then random rationals with |num|, den <= bound."""
    count = 0
    for v in _PROBE_VALUES:
        if count >= budget:
            return
        count += 1
        yield {n: Fraction(v) for n in names}
        if not names:
            return
    while count < budget:
        count += 1
        point = {}
        for n in names:
            if n in integer_names:
                point[n] = Fraction(rng.randint(-3, 6))
            elif rng.random() < 0.5:
                point[n] = Fraction(rng.randint(-10, 10))
            else:
                point[n] = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        yield point


def equiv(a: Term, b: Term, seed: int = 0, budget: int = SAMPLE_BUDGET) -> EquivVerdict:
    """Decide ``a = b`` as rational functions; refute by exact sampling.

    Equal when the normal forms coincide. Otherwise a separating point is
    searched for; uninterpreted functions get a consistent random
    interpretation, recorded in the verdict.
    """
    try:
        na, nb = normalize(a), normalize(b)
    except (UnsupportedTerm, DivisionByZero) as exc:
        return EquivVerdict("unknown", reason=str(exc))
    if na == nb:
        return EquivVerdict("equal")
    rng = random.Random(seed)
    names = sorted(term_free_vars(a) | term_free_vars(b))
    int_names = _exponent_vars(a) | _exponent_vars(b)
    funcs = {name for name, _ in term_functions(a) | term_functions(b)}
    for point in sample_points(names, rng, budget, int_names):
        impl = {name: _RandomFunction(rng) for name in funcs}
        ev = Evaluator(point, impl)
        try:
            va, vb = ev.term(a), ev.term(b)
        except EvaluationError:
            continue
        if va != vb:
            interp = {f"{name}({', '.join(str(x) for x in args)})": val
                      for (name, args), val in ev.calls.items()}
            return EquivVerdict("not_equal", point, va, vb, interp)
    return EquivVerdict("unknown", reason="no separating point found within the sampling budget")


# -- roots ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticSurd:
    """The real number ``rational + coeff * sqrt(radicand)``, radicand squarefree > 1."""

    rational: Fraction
    coeff: Fraction
    radicand: int

    def __float__(self) -> float:
        return float(self.rational) + float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self) -> str:
        sign = "+" if self.coeff > 0 else "-"
        mag = abs(self.coeff)
        tail = f"sqrt({self.radicand})" if mag == 1 else f"{mag}*sqrt({self.radicand})"
        if self.rational == 0:
            return tail if sign == "+" else f"-{tail}"
        return f"{self.rational} {sign} {tail}"

    def eval_poly(self, coeffs: list[Fraction]) -> tuple[Fraction, Fraction]:
        """Exact value of ``sum c_i * self**i`` as ``(p, q)`` meaning ``p + q*sqrt(d)``."""
        d = self.radicand
        acc = (Fraction(0), Fraction(0))
        for c in reversed(coeffs):   # Horner
            p, q = acc
            acc = (p * self.rational + q * self.coeff * d + c,
                   p * self.coeff + q * self.rational)
        return acc


Root = Union[Fraction, QuadraticSurd]


def _squarefree_split(n: int) -> tuple[int, int]:
    """``n = s*s*d`` with ``d`` squarefree; returns ``(s, d)``."""
    s, d, k = 1, n, 2
    while k * k <= d:
        while d % (k * k) == 0:
            d //= k * k
            s *= k
        k += 1
    return s, d


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def _synthetic_division(coeffs: list[Fraction], r: Fraction) -> list[Fraction]:
    """Divide (low-to-high coefficients) by ``x - r``; caller ensures ``r`` is a root."""
    high = coeffs[::-1]
    out = [high[0]]
    for c in high[1:-1]:
        out.append(c + out[-1] * r)
    return out[::-1]


def _eval_univariate(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    scale = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * scale) for c in coeffs]
    a0, an = ints[0], ints[-1]
    if a0 == 0:
        return [Fraction(0)]
    found = []
    for p in _divisors(a0):
        for q in _divisors(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in found and _eval_univariate(coeffs, cand) == 0:
                    found.append(cand)
    return found


def _quadratic_roots(c0: Fraction, c1: Fraction, c2: Fraction) -> list[Root]:
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return []
    centre = -c1 / (2 * c2)
    if disc == 0:
        return [centre]
    # sqrt(p/q) = sqrt(p*q)/q
    s, d = _squarefree_split(disc.numerator * disc.denominator)
    half = Fraction(s, disc.denominator) / (2 * abs(c2))
    if d == 1:
        return [centre - half, centre + half]
    return [QuadraticSurd(centre, -half, d), QuadraticSurd(centre, half, d)]


def solve_univariate(lhs: Term, rhs: Term, v: str) -> list[Root]:
    """Real roots of ``lhs = rhs`` in ``v``, exact and sorted ascending.

    Supported: degree <= 2 (radicals allowed), or degree <= 4 where rational
    roots deflate the problem to degree <= 2.
    """
    nf = normalize(Sub(lhs, rhs))
    stray = (nf.num.atoms() | nf.den.atoms()) - {v}
    if stray:
        raise NotUnivariate(f"equation also involves {', '.join(sorted(stray))}")
    if nf.num.is_zero():
        raise DegenerateEquation("equation holds for every value")
    by_exp = nf.num.coeffs_in(v)
    degree = max(by_exp)
    if degree > 4:
        raise DegreeTooHigh(f"degree {degree} exceeds 4")
    coeffs = [by_exp.get(i, ONE.scale(0)).const_value() for i in range(degree + 1)]

    roots: list[Root] = []
    while len(coeffs) - 1 > 2:
        rational = _rational_roots(coeffs)
        if not rational:
            raise DegreeTooHigh(f"degree {len(coeffs) - 1} factor without rational roots")
        r = rational[0]
        roots.append(r)
        coeffs = _synthetic_division(coeffs, r)
    if len(coeffs) == 3:
        roots.extend(_quadratic_roots(*coeffs))
    elif len(coeffs) == 2:
        roots.append(-coeffs[0] / coeffs[1])

    den_coeffs = None
    if nf.den != ONE:
        den_by = nf.den.coeffs_in(v)
        den_coeffs = [den_by[i].const_value() if i in den_by else Fraction(0)
                      for i in range(max(den_by) + 1)]
    unique: list[Root] = []
    for r in roots:
        if r in unique:
            continue
        if den_coeffs is not None:
            if isinstance(r, QuadraticSurd):
                if r.eval_poly(den_coeffs) == (0, 0):
                    continue
            elif _eval_univariate(den_coeffs, r) == 0:
                continue
        unique.append(r)
    return sorted(unique, key=float)


# -- derivatives ----------------------------------------------------------------------


def derivative_nf(nf: PolyNormalForm, v: str) -> PolyNormalForm:
    for key in nf.opaque_atoms():
        if v in term_free_vars(nf.atoms[key]):
            raise UnsupportedTerm(f"cannot differentiate opaque subterm {key}")
    dn = nf.num.derivative(v)
    if nf.den == ONE:
        return PolyNormalForm(dn, ONE, nf.atoms)
    dd = nf.den.derivative(v)
    return PolyNormalForm.make(dn * nf.den - nf.num * dd, nf.den * nf.den, nf.atoms)


def differentiate(t: Term, v: str) -> Term:
    """Symbolic derivative of an algebraic term, returned in normalized shape."""
    return to_term(derivative_nf(normalize(t), v))
