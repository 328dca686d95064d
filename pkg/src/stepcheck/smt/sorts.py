"""Assigning SimpleMath sorts to the symbols of a judgment."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SortClash
from ..graph import Judgment
from ..lang import Member, Sort, Var, conjuncts, free_variables, functions_used


@dataclass(frozen=True)
class FunctionSig:
    args: tuple[Sort, ...]
    result: Sort
    defined: bool = False     # True when a Definition gives it meaning

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass
class SortMap:
    variables: dict[str, Sort] = field(default_factory=dict)
    functions: dict[str, FunctionSig] = field(default_factory=dict)

    def __getitem__(self, name: str):
        if name in self.variables:
            return self.variables[name]
        return self.functions[name]


def solver_sort(s: Sort) -> str:
    """Naturals and integers live in ``Int``; rationals and reals in ``Real``."""
    return "Int" if s in (Sort.NAT, Sort.INT) else "Real"


def _memberships(formula) -> list[tuple[str, Sort]]:
    return [(c.term.name, c.sort) for c in conjuncts(formula)
            if isinstance(c, Member) and isinstance(c.term, Var)]


def infer_sorts(j: Judgment) -> SortMap:
    """Sorts for every free variable and function symbol of ``j``.

    A variable gets the join of the memberships its premises state at top
    level (``n in NN /\\ ...``), defaulting to Real. Functions with a
    Definition take its signature; other functions are Real-valued on reals.
    """
    definitions = j.all_definitions()
    formulas = j.premise_formulas() + [j.conclusion.body]
    out = SortMap()
    for d in definitions:
        out.functions[d.name] = FunctionSig(d.arg_sorts, d.result_sort, True)

    usage: dict[str, int] = {}
    for item in formulas + definitions:
        for name, arity in sorted(functions_used(item)):
            seen = usage.setdefault(name, arity)
            if seen != arity:
                raise SortClash(f"{name} is applied to both {seen} and {arity} argument(s)")
    for name, arity in sorted(usage.items()):
        sig = out.functions.get(name)
        if sig is None:
            out.functions[name] = FunctionSig((Sort.REAL,) * arity, Sort.REAL)
        elif sig.arity != arity:
            raise SortClash(f"{name} is defined with {sig.arity} parameter(s) "
                            f"but applied to {arity}")

    names: set[str] = set()
    for f in formulas:
        names |= free_variables(f)
    for name in sorted(names):
        if name in out.functions:
            raise SortClash(f"{name} is used both as a variable and as a function")
        sort = None
        for f in j.premise_formulas():
            for v, s in _memberships(f):
                if v == name:
                    sort = s if sort is None else sort.join(s)
        out.variables[name] = sort or Sort.REAL
    return out
