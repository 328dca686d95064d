"""The critic: routes each judgment to tool legs and assembles a context report.

Three deterministic legs decide judgments:

* ``exact``: evaluates the judgment at the point forced by premise equations
  (``x = 2``), unfolding definitions exactly;
* ``cas``: substitutes premise equations into an equational conclusion and
  compares rational normal forms, refuting by exact sampling;
* ``smt``: checks that the premises with the negated conclusion are unsat.

A leg either decides (Valid or Invalid) or abstains with Unknown, in which
case the next leg of the route is tried. Verdicts come only from tools; an
optional language-model hook may add prose explanations to Invalid verdicts.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Protocol, Sequence

from .cas import Evaluator, equiv, in_sort
from .context import Context, StatementKind, validate_context
from .errors import CaptureError, EvaluationError, UnsupportedTerm
from .graph import (
    Corollary, CostMetrics, Judgment, build_graph, corollaries, cost_metrics,
    extract_judgments,
)
from .lang import (
    Member, Rel, Sort, Var, conjuncts, free_variables, functions_used,
    print_formula, substitute_term, term_free_vars,
)
from .lang.transform import has_quantifier
from .smt import SolverConfig, SolverPool, check_entailment
from .verdict import Status, Verdict

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class Route(Enum):
    ARITHMETIC = "Arithmetic"
    ALGEBRAIC = "Algebraic"
    LOGICAL = "Logical"


TOOL_ORDER: dict[Route, tuple[str, ...]] = {
    Route.ARITHMETIC: ("exact", "cas", "smt"),
    Route.ALGEBRAIC: ("cas", "exact", "smt"),
    Route.LOGICAL: ("smt", "cas"),
}


def classify_judgment(j: Judgment) -> Route:
    """Variable-free relations are arithmetic, equations with variables algebraic."""
    body = j.conclusion.body
    if isinstance(body, Rel):
        if not free_variables(body):
            return Route.ARITHMETIC
        if body.op == "=":
            return Route.ALGEBRAIC
    return Route.LOGICAL


# -- shared helpers ------------------------------------------------------------------


def _show(q: Fraction) -> str:
    return str(q)


def _flat_premises(j: Judgment) -> list:
    out = []
    for f in j.premise_formulas():
        out.extend(conjuncts(f))
    return out


def _declared_sorts(premises: list) -> dict[str, Sort]:
    """Tightest membership sort stated for each variable among the premises."""
    sorts: dict[str, Sort] = {}
    for p in premises:
        if isinstance(p, Member) and isinstance(p.term, Var):
            old = sorts.get(p.term.name)
            if old is None or p.sort.rank < old.rank:
                sorts[p.term.name] = p.sort
    return sorts


def _definitions(j: Judgment) -> dict:
    return {d.name: d for d in j.all_definitions()}


def _calls_text(ev: Evaluator) -> str:
    shown = [f"{name}({', '.join(_show(a) for a in args)}) = {_show(value)}"
             for (name, args), value in sorted(ev.calls.items(), key=lambda kv: kv[0])]
    return ", ".join(shown)


def _counterexample(env: dict[str, Fraction], ev: Evaluator) -> dict[str, str]:
    cex = {name: _show(v) for name, v in sorted(env.items())}
    for (name, args), value in sorted(ev.calls.items(), key=lambda kv: kv[0]):
        cex[f"{name}({', '.join(_show(a) for a in args)})"] = _show(value)
    return cex


def _refutation_reason(j: Judgment, env: dict[str, Fraction], ev: Evaluator) -> str:
    parts = [f"{k} = {v}" for k, v in _counterexample(env, ev).items()]
    where = f" at {', '.join(parts)}" if parts else ""
    return (f"premises hold but conclusion {print_formula(j.conclusion.body)} "
            f"fails{where}")


# -- exact-arithmetic leg -------------------------------------------------------------


def _forced_point(j: Judgment) -> tuple[dict[str, Fraction], Evaluator]:
    """Values every model of the premises must give, from equations ``v = t``."""
    defs = _definitions(j)
    env: dict[str, Fraction] = {}
    eqs = [p for p in _flat_premises(j) if isinstance(p, Rel) and p.op == "="]
    progress = True
    while progress:
        progress = False
        for eq in eqs:
            for side, other in ((eq.left, eq.right), (eq.right, eq.left)):
                if isinstance(side, Var) and side.name not in env:
                    if not term_free_vars(other) <= env.keys():
                        continue
                    try:
                        env[side.name] = Evaluator(env, defs).term(other)
                    except EvaluationError:
                        continue
                    progress = True
    return env, Evaluator(env, defs)


def exact_leg(j: Judgment) -> Verdict:
    tool = "exact"
    conclusion = j.conclusion.body
    if has_quantifier(conclusion):
        return Verdict.unknown(tool, "conclusion is quantified")
    env, ev = _forced_point(j)
    missing = sorted(free_variables(conclusion) - env.keys())
    if missing:
        return Verdict.unknown(tool, f"no value forced for {', '.join(missing)}")
    try:
        concl_holds = ev.formula(conclusion)
    except (EvaluationError, UnsupportedTerm) as exc:
        return Verdict.unknown(tool, f"conclusion cannot be evaluated: {exc}")
    calls = _calls_text(ev)
    if concl_holds:
        note = f" ({calls})" if calls else ""
        forced = ", ".join(f"{k} = {_show(v)}" for k, v in sorted(env.items()))
        where = f" at the forced point {forced}" if forced else ""
        return Verdict.valid(tool, evidence="exact-evaluation",
                             reason=f"conclusion evaluates to true{where}{note}")
    premises = j.premise_formulas()
    if any(has_quantifier(p) for p in premises):
        return Verdict.unknown(tool, "quantified premises cannot be evaluated exactly")
    unbound = sorted(set().union(*(free_variables(p) for p in premises)) - env.keys()) \
        if premises else []
    if unbound:
        return Verdict.unknown(tool, f"premises leave {', '.join(unbound)} unconstrained")
    try:
        premises_hold = all(ev.formula(p) for p in premises)
    except (EvaluationError, UnsupportedTerm) as exc:
        return Verdict.unknown(tool, f"premises cannot be evaluated: {exc}")
    if not premises_hold:
        return Verdict.valid(tool, evidence="exact-evaluation",
                             reason="premises are inconsistent at their forced point")
    return Verdict.invalid(tool, _refutation_reason(j, env, ev), _counterexample(env, ev),
                           replayed=True)


# -- computer-algebra leg --------------------------------------------------------------


def _eliminate(j: Judgment):
    """Substitute premise equations ``v = t`` into the conclusion's two sides."""
    body = j.conclusion.body
    left, right = body.left, body.right
    bindings: dict[str, object] = {}
    for eq in _flat_premises(j):
        if not (isinstance(eq, Rel) and eq.op == "="):
            continue
        for side, other in ((eq.left, eq.right), (eq.right, eq.left)):
            if not isinstance(side, Var) or side.name in bindings:
                continue
            for name, value in bindings.items():
                other = substitute_term(other, name, value)
            if side.name in term_free_vars(other):
                continue
            for name in list(bindings):
                bindings[name] = substitute_term(bindings[name], side.name, other)
            bindings[side.name] = other
            break
    for name, value in bindings.items():
        left = substitute_term(left, name, value)
        right = substitute_term(right, name, value)
    return left, right, bindings


def _grid(names: list[str], sorts: dict[str, Sort], limit: int = 343):
    ranges = []
    for n in names:
        s = sorts.get(n)
        if s is Sort.NAT:
            ranges.append([Fraction(k) for k in range(7)])
        elif s is Sort.INT:
            ranges.append([Fraction(k) for k in (0, 1, -1, 2, -2, 3, -3)])
        else:
            ranges.append([Fraction(k) for k in (0, 1, -1, 2, -2)] + [Fraction(1, 2)])
    return itertools.islice(itertools.product(*ranges), limit)


def _replay(j: Judgment, env: dict[str, Fraction]) -> tuple[bool, Evaluator]:
    """True when ``env`` (already closed over bound variables) refutes ``j``."""
    ev = Evaluator(env, _definitions(j))
    try:
        ok = all(ev.formula(p) for p in j.premise_formulas())
        return ok and not ev.formula(j.conclusion.body), ev
    except (EvaluationError, UnsupportedTerm):
        return False, ev


def cas_leg(j: Judgment, seed: int = 0) -> Verdict:
    tool = "cas"
    body = j.conclusion.body
    if not (isinstance(body, Rel) and body.op == "="):
        return Verdict.unknown(tool, "conclusion is not an equation")
    try:
        left, right, bindings = _eliminate(j)
    except CaptureError as exc:
        return Verdict.unknown(tool, f"substitution failed: {exc}")
    result = equiv(left, right, seed=seed)
    if result.equal:
        via = f" after substituting {', '.join(sorted(bindings))}" if bindings else ""
        return Verdict.valid(tool, evidence="cas:normal-form",
                             reason=f"both sides have the same normal form{via}")
    if not result.not_equal:
        return Verdict.unknown(tool, result.reason or "equivalence undecided")
    if any(functions_used(f) for f in j.premise_formulas() + [body]):
        return Verdict.unknown(tool, "sides differ, but function symbols block an exact "
                                     "counterexample")
    premises = j.premise_formulas()
    if any(has_quantifier(p) for p in premises):
        return Verdict.unknown(tool, "sides differ, but quantified premises block replay")
    free = sorted(term_free_vars(left) | term_free_vars(right))
    sorts = _declared_sorts(_flat_premises(j))
    unconstrained = sorted(set().union(*(free_variables(p) for p in premises))
                           - set(free) - bindings.keys()) if premises else []
    candidates = [tuple(result.witness.get(n, Fraction(0)) for n in free)]
    candidates.extend(_grid(free + unconstrained, sorts))
    names = free + unconstrained
    for point in candidates:
        env = dict(zip(names, point))
        for n in unconstrained:
            env.setdefault(n, Fraction(0))
        try:
            for name, value in bindings.items():
                env[name] = Evaluator(env).term(value)
        except EvaluationError:
            continue
        if any(not in_sort(env[n], s) for n, s in sorts.items() if n in env):
            continue
        refuted, ev = _replay(j, env)
        if refuted:
            return Verdict.invalid(tool, _refutation_reason(j, env, ev),
                                   _counterexample(env, ev), replayed=True)
    return Verdict.unknown(tool, "sides differ as expressions, but no point satisfying the "
                                 "premises separates them")


# -- orchestration ---------------------------------------------------------------------


class Explainer(Protocol):
    """Any text-completion endpoint; used only to phrase feedback."""

    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class CriticConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    workers: int = 4
    seed: int = 0


@dataclass(frozen=True)
class JudgmentResult:
    id: int
    route: Route
    premises: tuple[int, ...]
    definitions: tuple[int, ...]
    formula: str
    source_text: str | None
    verdict: Verdict
    explanation: str | None = None

    def to_json(self) -> dict:
        out = {"id": self.id, "route": self.route.value, "premises": list(self.premises),
               "definitions": list(self.definitions), "formula": self.formula,
               "source_text": self.source_text, "verdict": self.verdict.to_json()}
        if self.explanation is not None:
            out["explanation"] = self.explanation
        return out


class Overall(Enum):
    ALL_VALID = "AllValid"
    HAS_INVALID = "HasInvalid"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {"AllValid": 0, "HasInvalid": 1, "Inconclusive": 2}[self.value]


@dataclass(frozen=True)
class CorollaryResult:
    corollary: Corollary
    derivable: bool       # the conclusion and every link of its chain are Valid

    def to_json(self) -> dict:
        return {**self.corollary.to_json(), "derivable": self.derivable}


@dataclass(frozen=True)
class Report:
    results: tuple[JudgmentResult, ...]
    overall: Overall
    first_invalid: int | None
    cost: CostMetrics
    corollaries: tuple[CorollaryResult, ...]
    trusted: tuple[int, ...]
    premises_submitted: int
    problem_text: str = ""
    statement_count: int = 0
    lints: tuple[str, ...] = ()

    @property
    def verdicts(self) -> dict[int, Verdict]:
        return {r.id: r.verdict for r in self.results}

    @property
    def exit_code(self) -> int:
        return self.overall.exit_code

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "problem": self.problem_text,
            "statement_count": self.statement_count,
            "overall": {"status": self.overall.value, "first_invalid": self.first_invalid},
            "judgments": [r.to_json() for r in self.results],
            "cost": {**self.cost.to_json(), "premises_submitted": self.premises_submitted},
            "corollaries": [c.to_json() for c in self.corollaries],
            "trusted": list(self.trusted),
            "lints": list(self.lints),
        }


def overall_status(verdicts: Sequence[tuple[int, Verdict]]) -> tuple[Overall, int | None]:
    invalid = [i for i, v in verdicts if v.is_invalid]
    if invalid:
        return Overall.HAS_INVALID, min(invalid)
    if all(v.is_valid for _, v in verdicts):
        return Overall.ALL_VALID, None
    return Overall.INCONCLUSIVE, None


class Critic:
    """Verifies judgments; holds only the shared solver pool between calls."""

    def __init__(self, config: CriticConfig | None = None, pool: SolverPool | None = None,
                 explainer: Explainer | None = None):
        self.config = config or CriticConfig()
        self.pool = pool or SolverPool(self.config.solver)
        self.explainer = explainer
        self._legs: dict[str, Callable[[Judgment], Verdict]] = {
            "exact": exact_leg,
            "cas": lambda j: cas_leg(j, seed=self.config.seed),
            "smt": lambda j: check_entailment(j, self.pool),
        }

    def verify_judgment(self, j: Judgment) -> Verdict:
        legs = []
        for tool in TOOL_ORDER[classify_judgment(j)]:
            try:
                verdict = self._legs[tool](j)
            except Exception as exc:   # a failing tool only abstains
                log.warning("tool %s failed on judgment %d: %s", tool, j.id, exc)
                verdict = Verdict.unknown(tool, f"tool failure: {exc}")
            legs.append((tool, verdict.status.value, verdict.reason))
            if not verdict.is_unknown:
                return replace(verdict, legs=tuple(legs))
        reasons = "; ".join(f"{t}: {r}" for t, _, r in legs)
        return Verdict(Status.UNKNOWN, "critic", reasons, legs=tuple(legs))

    def _explain(self, j: Judgment, verdict: Verdict) -> str | None:
        if self.explainer is None or not verdict.is_invalid:
            return None
        prompt = (f"Explain briefly why this step is wrong.\nStep: "
                  f"{print_formula(j.conclusion.body)}\nChecker finding: {verdict.reason}\n")
        try:
            return self.explainer.complete(prompt).strip()
        except Exception as exc:
            log.warning("explanation hook failed: %s", exc)
            return None

    def _result(self, j: Judgment) -> JudgmentResult:
        verdict = self.verify_judgment(j)
        return JudgmentResult(j.id, classify_judgment(j), tuple(j.premise_ids),
                              tuple(s.id for s in j.definitions),
                              print_formula(j.conclusion.body), j.conclusion.source_text,
                              verdict, self._explain(j, verdict))

    def verify_context(self, ctx: Context) -> Report:
        g = build_graph(ctx)
        judgments = extract_judgments(g, ctx)
        workers = max(1, self.config.workers)
        if workers == 1 or len(judgments) <= 1:
            results = [self._result(j) for j in judgments]
        else:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(self._result, judgments))
        overall, first = overall_status([(r.id, r.verdict) for r in results])
        by_id = {r.id: r.verdict for r in results}
        cors = tuple(CorollaryResult(c, all(by_id[i].is_valid
                                            for i in (c.conclusion, *c.chain)))
                     for c in corollaries(g))
        trusted = tuple(s.id for s in ctx.statements if s.kind is StatementKind.THEOREM)
        lints = tuple(str(d) for d in validate_context(ctx) if d.severity == "lint")
        return Report(tuple(results), overall, first, cost_metrics(g), cors, trusted,
                      sum(len(j.premises) for j in judgments), ctx.problem_text,
                      len(ctx.statements), lints)


def verify_judgment(j: Judgment, config: CriticConfig | None = None) -> Verdict:
    return Critic(config).verify_judgment(j)


def verify_context(ctx: Context, config: CriticConfig | None = None,
                   explainer: Explainer | None = None) -> Report:
    return Critic(config, explainer=explainer).verify_context(ctx)


# -- feedback and selection ------------------------------------------------------------

FEEDBACK_TEMPLATE = (
    "Step {id} is incorrect.\n"
    "  Original text: {source}\n"
    "  Formal statement: {formula}\n"
    "  Reason: {reason}\n"
    "{counterexample}"
    "  Suggestion: {suggestion}"
)
SUGGESTION = ("Recompute this step from the statements it cites and make sure it follows "
              "from them.")


@dataclass(frozen=True)
class Feedback:
    statement_id: int
    formula: str
    reason: str
    counterexample: dict[str, str] | None
    source_text: str | None
    suggestion: str = SUGGESTION
    explanation: str | None = None

    def render(self) -> str:
        cex = ""
        if self.counterexample:
            shown = ", ".join(f"{k} = {v}" for k, v in self.counterexample.items())
            cex = f"  Counterexample: {shown}\n"
        text = FEEDBACK_TEMPLATE.format(id=self.statement_id,
                                        source=self.source_text or "(none)",
                                        formula=self.formula, reason=self.reason,
                                        counterexample=cex, suggestion=self.suggestion)
        if self.explanation:
            text += f"\n  Explanation: {self.explanation}"
        return text

    def to_json(self) -> dict:
        return {"statement_id": self.statement_id, "formula": self.formula,
                "reason": self.reason, "counterexample": self.counterexample,
                "source_text": self.source_text, "suggestion": self.suggestion,
                "explanation": self.explanation}


def make_feedback(report: Report) -> list[Feedback]:
    return [Feedback(r.id, r.formula, r.verdict.reason, r.verdict.counterexample,
                     r.source_text, explanation=r.explanation)
            for r in sorted(report.results, key=lambda r: r.id) if r.verdict.is_invalid]


def select_solution(candidates: Sequence[tuple[Context, Report | None]]) -> int | None:
    """Fewest statements among AllValid candidates; ties go to the lower index."""
    best: tuple[int, int] | None = None
    for i, (ctx, report) in enumerate(candidates):
        if report is None or report.overall is not Overall.ALL_VALID:
            continue
        key = (len(ctx.statements), i)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]


__all__ = [
    "Critic", "CriticConfig", "CorollaryResult", "Explainer", "Feedback", "JudgmentResult",
    "Overall", "Report", "Route", "SCHEMA_VERSION", "TOOL_ORDER", "cas_leg",
    "classify_judgment", "exact_leg", "make_feedback", "overall_status", "select_solution",
    "verify_context", "verify_judgment",
]
