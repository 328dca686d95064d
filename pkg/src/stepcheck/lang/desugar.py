"""Piecewise definitions as first-order formulas, plus guard lints."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .ast import (
    App, Branch, Definition, Forall, Formula, Implies, Member, Rel, Sort, TRUE,
    Var, conjoin, disjoin,
)


def desugar_definition(d: Definition) -> Formula:
    """``forall params, params in sorts -> /\\_i (guard_i -> f(params) = body_i)``.

    Branches sharing a body are merged into one implication whose guard is
    the disjunction of theirs; groups keep the order of first appearance.
    """
    call = App(d.name, tuple(Var(p) for p in d.params))
    groups: dict = {}
    for b in d.branches:
        groups.setdefault(b.body, []).append(b.guard)
    clauses = []
    for body, guards in groups.items():
        eq = Rel("=", call, body)
        guard = TRUE if any(g == TRUE for g in guards) else disjoin(guards)
        clauses.append(eq if guard == TRUE else Implies(guard, eq))
    antecedent = conjoin([Member(Var(p), s) for p, s in zip(d.params, d.arg_sorts)])
    f: Formula = Implies(antecedent, conjoin(clauses))
    for p, s in reversed(list(zip(d.params, d.arg_sorts))):
        f = Forall(p, s, f)
    return f


@dataclass(frozen=True)
class GuardLint:
    rule: str          # "guard-overlap" or "guard-gap"
    point: tuple       # argument tuple where it was observed
    message: str


def guard_lints(d: Definition, bound: int = 12) -> list[GuardLint]:
    """Sample integer arguments in ``[-bound, bound]`` looking for guard gaps/overlaps.

    Only meaningful for integer-domain definitions; others return ``[]``.
    Overlapping guards with *equal* bodies are not reported.
    """
    from ..cas.evaluate import holds
    from ..errors import EvaluationError

    if any(s not in (Sort.NAT, Sort.INT) for s in d.arg_sorts):
        return []
    lints: list[GuardLint] = []
    lo = {Sort.NAT: 0, Sort.INT: -bound}
    ranges = [range(lo[s], bound + 1) for s in d.arg_sorts]
    seen_rules: set[str] = set()
    for point in product(*ranges):
        env = {p: Fraction(v) for p, v in zip(d.params, point)}
        try:
            active = [b for b in d.branches if holds(b.guard, env)]
        except EvaluationError:
            continue
        if not active and "guard-gap" not in seen_rules:
            seen_rules.add("guard-gap")
            lints.append(GuardLint("guard-gap", point,
                                   f"no branch of {d.name} applies at {point}"))
        bodies = {b.body for b in active}
        if len(bodies) > 1 and "guard-overlap" not in seen_rules:
            seen_rules.add("guard-overlap")
            lints.append(GuardLint("guard-overlap", point,
                                   f"branches of {d.name} with different bodies overlap at {point}"))
    return lints


def single_branch(d: Definition) -> Branch | None:
    return d.branches[0] if len(d.branches) == 1 else None
