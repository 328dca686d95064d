"""Entailment checking: a judgment holds iff premises with the negated conclusion are unsat."""

from __future__ import annotations

from fractions import Fraction

from ..cas.evaluate import Evaluator
from ..errors import EvaluationError, SortClash, UnsupportedFeature, UnsupportedTerm
from ..graph import Judgment
from ..lang import functions_used
from ..verdict import Verdict
from .encode import free_symbols, judgment_is_replayable, to_smtlib
from .sexp import ModelEvaluator, SExpError, parse_model
from .solver import OutcomeKind, SolverConfig, SolverOutcome, SolverPool

TOOL = "smt"


def _literal(q: Fraction):
    mag = abs(q)
    e = str(mag.numerator) if mag.denominator == 1 else ["/", str(mag.numerator), str(mag.denominator)]
    return e if q >= 0 else ["-", e]


def _show(q: Fraction) -> str:
    return str(q) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def replay_model(j: Judgment, outcome: SolverOutcome) -> tuple[bool, dict[str, str]]:
    """Evaluate the judgment exactly under the solver's model.

    Returns whether every premise held while the conclusion failed, and the
    counterexample (variables plus the function values that were used).
    """
    functions = parse_model(outcome.model_text)
    me = ModelEvaluator(functions)
    env: dict[str, Fraction] = {}
    for name in sorted(free_symbols(j)):
        env[name] = Fraction(me.value(name)) if name in functions else Fraction(0)

    impls: dict = {d.name: d for d in j.all_definitions()}

    def interpreted(name):
        def call(*args):
            if name not in functions:
                return Fraction(0)
            return Fraction(me.value([name, *(_literal(a) for a in args)]))
        return call

    for f in j.premise_formulas() + [j.conclusion.body]:
        for name, _ in functions_used(f):
            impls.setdefault(name, interpreted(name))
    ev = Evaluator(env, impls)
    premises_hold = all(ev.formula(p) for p in j.premise_formulas())
    conclusion_fails = not ev.formula(j.conclusion.body)
    cex = {name: _show(v) for name, v in env.items()}
    for (name, args), value in sorted(ev.calls.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        cex[f"{name}({', '.join(_show(a) for a in args)})"] = _show(value)
    return premises_hold and conclusion_fails, cex


def describe(cex: dict[str, str]) -> str:
    if not cex:
        return "premises hold but conclusion fails"
    shown = ", ".join(f"{k} = {v}" for k, v in cex.items())
    return f"premises hold but conclusion fails at {shown}"


def _instances_only(j: Judgment, pool: SolverPool) -> Verdict | None:
    """Quantifier-free pass using only ground instances of the definitions.

    Unsat here implies unsat of the full script (it asserts less); a model
    counts only if exact replay, which unfolds the real definitions, agrees.
    """
    script = to_smtlib(j, pool.config.timeout_ms, axioms=False)
    if script == to_smtlib(j, pool.config.timeout_ms):
        return None
    outcome = pool.run(script)
    if outcome.kind is OutcomeKind.UNSAT:
        return Verdict.valid(TOOL, evidence=f"smt2:{script.digest()[:16]}",
                             reason=f"negated conclusion unsatisfiable with ground "
                                    f"definition instances ({script.logic})")
    if outcome.kind is OutcomeKind.SAT:
        try:
            confirmed, cex = replay_model(j, outcome)
        except (SExpError, EvaluationError, UnsupportedTerm, TypeError, ValueError):
            return None
        if confirmed:
            return Verdict.invalid(TOOL, describe(cex), cex, replayed=True)
    return None


def check_entailment(j: Judgment, solver: SolverPool | SolverConfig | None = None) -> Verdict:
    """Valid on unsat, Invalid on a (replayed) model, Unknown otherwise."""
    pool = solver if isinstance(solver, SolverPool) else SolverPool(solver)
    try:
        script = to_smtlib(j, pool.config.timeout_ms)
    except (SortClash, UnsupportedFeature, UnsupportedTerm) as exc:
        return Verdict.unknown(TOOL, f"unsupported: {exc}")
    if j.all_definitions() and judgment_is_replayable(j):
        quick = _instances_only(j, pool)
        if quick is not None:
            return quick
    outcome = pool.run(script)
    if outcome.kind is OutcomeKind.UNSAT:
        return Verdict.valid(TOOL, evidence=f"smt2:{script.digest()[:16]}",
                             reason=f"negated conclusion unsatisfiable ({script.logic})")
    if outcome.kind is OutcomeKind.UNKNOWN:
        return Verdict.unknown(TOOL, outcome.reason or "unknown")
    if outcome.kind is OutcomeKind.ERROR:
        return Verdict.unknown(TOOL, f"solver-error: {outcome.reason}")

    if not judgment_is_replayable(j):
        cex = {}
        try:
            me = ModelEvaluator(parse_model(outcome.model_text))
            cex = {n: _show(Fraction(me.value(n))) for n in sorted(free_symbols(j))
                   if n in outcome.model}
        except (SExpError, TypeError, ValueError):
            pass
        return Verdict.invalid(TOOL, "solver found a model of the premises violating the "
                               "conclusion (quantified formulas, not replayed exactly); "
                               + describe(cex), cex, replayed=False)
    try:
        confirmed, cex = replay_model(j, outcome)
    except (SExpError, EvaluationError, UnsupportedTerm, TypeError, ValueError) as exc:
        return Verdict.unknown(TOOL, f"model could not be replayed exactly: {exc}")
    if not confirmed:
        return Verdict.unknown(TOOL, "solver model did not survive exact replay")
    return Verdict.invalid(TOOL, describe(cex), cex, replayed=True)


__all__ = ["check_entailment", "describe", "replay_model"]
