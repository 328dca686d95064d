"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a sorted tuple of ``(atom, exponent)`` pairs; atoms are
strings (variable names or canonical keys of opaque subterms). Monomials
are compared lexicographically with atoms in ascending string order.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping

Monomial = tuple[tuple[str, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for atom, e in b:
        exps[atom] = exps.get(atom, 0) + e
    return tuple(sorted(exps.items()))


def _mono_div(a: Monomial, b: Monomial) -> Monomial | None:
    exps = dict(a)
    for atom, e in b:
        have = exps.get(atom, 0)
        if have < e:
            return None
        if have == e:
            del exps[atom]
        else:
            exps[atom] = have - e
    return tuple(sorted(exps.items()))


def _lex_key(m: Monomial, order: list[str]) -> tuple[int, ...]:
    exps = dict(m)
    return tuple(exps.get(a, 0) for a in order)


class Poly:
    """Immutable polynomial; zero coefficients are never stored."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[m] = c
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    # -- constructors ----------------------------------------------------------

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def atom(cls, name: str, exp: int = 1) -> "Poly":
        return cls({((name, exp),) if exp else (): Fraction(1)})

    # -- queries ---------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(not m for m in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def atoms(self) -> set[str]:
        return {a for m in self.terms for a, _ in m}

    def degree(self, atom: str) -> int:
        return max((dict(m).get(atom, 0) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def coeffs_in(self, atom: str) -> dict[int, "Poly"]:
        """View as a univariate polynomial in ``atom`` with polynomial coefficients."""
        out: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.pop(atom, 0)
            out.setdefault(e, {})[tuple(sorted(exps.items()))] = c
        return {e: Poly(t) for e, t in out.items()}

    def leading(self, order: list[str] | None = None) -> tuple[Monomial, Fraction]:
        order = order or sorted(self.atoms())
        m = max(self.terms, key=lambda mono: _lex_key(mono, order))
        return m, self.terms[m]

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for atom, e in m:
                term *= Fraction(values[atom]) ** e
            total += term
        return total

    # -- arithmetic --------------------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    def scale(self, c: Fraction) -> "Poly":
        return Poly({m: v * c for m, v in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self, atom: str) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(atom, 0)
            if not e:
                continue
            if e == 1:
                del exps[atom]
            else:
                exps[atom] = e - 1
            key = tuple(sorted(exps.items()))
            out[key] = out.get(key, 0) + c * e
        return Poly(out)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        _, lc = self.leading()
        return self.scale(1 / lc)

    # -- identity ------------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(a if e == 1 else f"{a}^{e}" for a, e in m)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return "Poly(" + " + ".join(parts) + ")"


ZERO = Poly()
ONE = Poly.const(1)


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Multivariate division of ``a`` by a single divisor ``b`` (lex order)."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    order = sorted(a.atoms() | b.atoms())
    lm_b, lc_b = b.leading(order)
    q: dict[Monomial, Fraction] = {}
    r: dict[Monomial, Fraction] = {}
    p = a
    while not p.is_zero():
        lm_p, lc_p = p.leading(order)
        ratio = _mono_div(lm_p, lm_b)
        if ratio is None:
            r[lm_p] = r.get(lm_p, 0) + lc_p
            p = p - Poly({lm_p: lc_p})
        else:
            coef = lc_p / lc_b
            q[ratio] = q.get(ratio, 0) + coef
            p = p - Poly({ratio: coef}) * b
    return Poly(q), Poly(r)


def exact_div(a: Poly, b: Poly) -> Poly:
    q, r = divmod_poly(a, b)
    if not r.is_zero():
        raise ArithmeticError(f"{b!r} does not divide {a!r}")
    return q


def _prem(a: Poly, b: Poly, x: str) -> Poly:
    db = b.degree(x)
    lc_b = b.coeffs_in(x)[db]
    r = a
    while not r.is_zero() and x in r.atoms() and r.degree(x) >= db:
        dr = r.degree(x)
        lc_r = r.coeffs_in(x)[dr]
        r = lc_b * r - lc_r * Poly.atom(x, dr - db) * b
    return r


def content(p: Poly, x: str) -> Poly:
    return reduce(gcd, p.coeffs_in(x).values(), ZERO)


def primitive(p: Poly, x: str) -> Poly:
    c = content(p, x)
    return exact_div(p, c) if not c.is_zero() else p


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor over Q[atoms] (recursive primitive PRS)."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    atoms = a.atoms() | b.atoms()
    if not atoms or a.is_const() or b.is_const():
        return ONE
    x = min(atoms)
    if x not in a.atoms():
        return gcd(a, content(b, x))
    if x not in b.atoms():
        return gcd(content(a, x), b)
    ca, cb = content(a, x), content(b, x)
    c = gcd(ca, cb)
    pa, pb = exact_div(a, ca), exact_div(b, cb)
    if pa.degree(x) < pb.degree(x):
        pa, pb = pb, pa
    while not pb.is_zero() and x in pb.atoms():
        r = _prem(pa, pb, x)
        pa, pb = pb, (primitive(r, x) if not r.is_zero() else ZERO)
    if pb.is_zero():
        g = primitive(pa, x)
    else:
        g = ONE   # remainder chain hit a nonzero x-free polynomial: coprime in x
    return (c * g).monic()


def from_univariate(coeffs: Iterable[Fraction], atom: str) -> Poly:
    return Poly({((atom, i),) if i else (): Fraction(c) for i, c in enumerate(coeffs)})
