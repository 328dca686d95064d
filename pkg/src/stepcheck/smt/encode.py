"""Judgments as SMT-LIB 2 scripts: premises and the negated conclusion.

The judgment holds exactly when the script is unsatisfiable.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from fractions import Fraction

from ..cas.evaluate import Evaluator, in_sort
from ..errors import EvaluationError, SortClash, UnsupportedFeature, UnsupportedTerm
from ..graph import Judgment
from ..lang import (
    Add, And, App, Bool, Definition, Div, Exists, Forall, Formula, Implies,
    Member, Mul, Neg, Not, Num, Or, Pow, Rel, Sort, Sub, Term, Var,
    desugar_definition, free_variables, substitute_term, term_free_vars,
)
from ..lang.transform import has_quantifier
from .sorts import SortMap, infer_sorts, solver_sort

INSTANCE_BOUND = 32
MAX_INSTANCES = 256
DEFAULT_TIMEOUT_MS = 5000

# Symbols that would collide with SMT-LIB syntax or the arithmetic theories.
RESERVED = frozenset("""
    ! _ as let exists forall match par NUMERAL DECIMAL STRING and or not xor
    ite distinct true false abs div mod to_real to_int is_int Int Real Bool
    assert check-sat declare-fun define-fun set-logic set-option exit
    get-model get-value push pop model
""".split())


def symbol(name: str) -> str:
    return f"|{name}|" if name in RESERVED else name


@dataclass(frozen=True)
class SmtScript:
    logic: str
    declarations: tuple[str, ...]
    assertions: tuple[str, ...]
    produce_models: bool = True
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    comments: tuple[str, ...] = ()

    def text(self, seed: int | None = None, check: bool = True) -> str:
        lines = [f"; {c}" for c in self.comments]
        if self.produce_models:
            lines.append("(set-option :produce-models true)")
        if seed is not None:
            lines.append(f"(set-option :random-seed {seed})")
        lines.append(f"(set-logic {self.logic})")
        lines.extend(self.declarations)
        lines.extend(f"(assert {a})" for a in self.assertions)
        if check:
            lines.append("(check-sat)")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.text(check=False).encode()).hexdigest()


# -- helpers ------------------------------------------------------------------------


def _int_literal(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"


# Real literals are written as placeholders and finished once the logic is
# known: plain numerals in pure real logics, decimals when Int is also present.
_REAL_MARK = re.compile(r"@R(\d+)@")


def _real_literal(q: Fraction) -> str:
    mag = abs(q)
    body = (f"@R{mag.numerator}@" if mag.denominator == 1
            else f"(/ @R{mag.numerator}@ @R{mag.denominator}@)")
    return body if q >= 0 else f"(- {body})"


def _finish_literals(text: str, mixed: bool) -> str:
    return _REAL_MARK.sub(lambda m: m[1] + (".0" if mixed else ""), text)


def _is_constant(t: Term) -> bool:
    return not term_free_vars(t) and not _has_app(t)


def _has_app(t: Term) -> bool:
    if isinstance(t, App):
        return True
    if isinstance(t, (Num, Var)):
        return False
    if isinstance(t, Neg):
        return _has_app(t.arg)
    if isinstance(t, Pow):
        return _has_app(t.base) or _has_app(t.exp)
    return _has_app(t.left) or _has_app(t.right)


def fold_constants(t: Term) -> Term:
    """Replace every variable- and application-free subterm by its value."""
    if isinstance(t, (Num, Var)):
        return t
    if _is_constant(t):
        try:
            v = Evaluator().term(t)
        except EvaluationError:
            return t
        return Num(v) if v >= 0 else Neg(Num(-v))
    if isinstance(t, App):
        return App(t.func, tuple(fold_constants(a) for a in t.args))
    if isinstance(t, Neg):
        return Neg(fold_constants(t.arg))
    if isinstance(t, Pow):
        return Pow(fold_constants(t.base), t.exp)
    return type(t)(fold_constants(t.left), fold_constants(t.right))


def _ground_apps(node, out: list) -> None:
    if isinstance(node, App):
        if all(_is_constant(a) for a in node.args):
            out.append(node)
        for a in node.args:
            _ground_apps(a, out)
    elif isinstance(node, (Rel,)):
        _ground_apps(node.left, out)
        _ground_apps(node.right, out)
    elif isinstance(node, Member):
        _ground_apps(node.term, out)
    elif isinstance(node, (Not,)):
        _ground_apps(node.arg, out)
    elif isinstance(node, (And, Or, Implies, Add, Sub, Mul, Div)):
        _ground_apps(node.left, out)
        _ground_apps(node.right, out)
    elif isinstance(node, (Forall, Exists)):
        _ground_apps(node.body, out)
    elif isinstance(node, Neg):
        _ground_apps(node.arg, out)
    elif isinstance(node, Pow):
        _ground_apps(node.base, out)


def ground_instances(definitions: list[Definition], seeds: list[Formula],
                     bound: int = INSTANCE_BOUND, limit: int = MAX_INSTANCES) -> list[Formula]:
    """Instances ``f(a) = body[a]`` for literal arguments ``|a| <= bound``.

    Starts from applications in ``seeds`` and closes over the applications
    the instantiated bodies introduce. Only branches whose guard decides
    to true at the point are emitted, so every instance follows from the
    definition.
    """
    table = {d.name: d for d in definitions}
    todo: list[App] = []
    for f in seeds:
        _ground_apps(f, todo)
    seen: set[tuple] = set()
    out: list[Formula] = []
    while todo and len(out) < limit:
        app = todo.pop(0)
        d = table.get(app.func)
        if d is None:
            continue
        try:
            args = tuple(Evaluator().term(a) for a in app.args)
        except EvaluationError:
            continue
        key = (d.name, args)
        if key in seen:
            continue
        seen.add(key)
        if any(abs(a) > bound or not in_sort(a, s) for a, s in zip(args, d.arg_sorts)):
            continue
        env = dict(zip(d.params, args))
        for branch in d.branches:
            try:
                applies = Evaluator(env).formula(branch.guard)
            except (EvaluationError, UnsupportedTerm):
                break          # guard not decidable here: emit nothing further
            if applies:
                mapping = {p: (Num(a) if a >= 0 else Neg(Num(-a))) for p, a in env.items()}
                body = fold_constants(_subst_term(branch.body, mapping))
                literal_args = tuple(mapping[p] for p in d.params)
                instance = Rel("=", App(d.name, literal_args), body)
                out.append(instance)
                _ground_apps(body, todo)
                break
    return out


def _subst_term(t: Term, mapping: dict[str, Term]) -> Term:
    for v, r in mapping.items():      # replacements are ground: no capture
        t = substitute_term(t, v, r)
    return t


# -- encoder ---------------------------------------------------------------------------


class _Encoder:
    def __init__(self, sorts: SortMap):
        self.sorts = sorts
        self.bound: list[tuple[str, Sort]] = []
        self.types_used: set[str] = set()
        self.nonlinear = False
        self.quantified = False

    # types
    def var_sort(self, name: str) -> Sort:
        for v, s in reversed(self.bound):
            if v == name:
                return s
        try:
            return self.sorts.variables[name]
        except KeyError:
            raise SortClash(f"{name} has no sort") from None

    def type_of(self, t: Term) -> str:
        if isinstance(t, Num):
            return "Int" if t.value.denominator == 1 else "Real"
        if isinstance(t, Var):
            return solver_sort(self.var_sort(t.name))
        if isinstance(t, App):
            return solver_sort(self.sorts.functions[t.func].result)
        if isinstance(t, Neg):
            return self.type_of(t.arg)
        if isinstance(t, (Add, Sub, Mul)):
            a, b = self.type_of(t.left), self.type_of(t.right)
            return "Int" if a == b == "Int" else "Real"
        if isinstance(t, Div):
            return "Real"
        if isinstance(t, Pow):
            k = self._literal_exponent(t)
            return self.type_of(t.base) if k >= 0 else "Real"
        raise UnsupportedFeature(f"cannot encode {t!r}")

    def _literal_exponent(self, t: Pow) -> int:
        e = t.exp
        if isinstance(e, Num) and e.value.denominator == 1:
            return int(e.value)
        if isinstance(e, Neg) and isinstance(e.arg, Num) and e.arg.value.denominator == 1:
            return -int(e.arg.value)
        raise UnsupportedFeature("powers with a symbolic exponent are outside the solver logics")

    # terms
    def term(self, t: Term, want: str | None = None) -> str:
        natural = self.type_of(t)
        target = want or natural
        if isinstance(t, Num):
            if target == "Int":
                if t.value.denominator != 1:
                    raise UnsupportedFeature(f"{t.value} stands where an Int is required")
                self.types_used.add("Int")
                return _int_literal(int(t.value))
            self.types_used.add("Real")
            return _real_literal(t.value)
        text = self._term(t, natural)
        self.types_used.add(natural)
        if natural == target:
            return text
        if natural == "Int" and target == "Real":
            self.types_used.add("Real")
            return f"(to_real {text})"
        raise UnsupportedFeature("a Real-valued term cannot stand where an Int is required")

    def _term(self, t: Term, ty: str) -> str:
        if isinstance(t, Var):
            return symbol(t.name)
        if isinstance(t, App):
            sig = self.sorts.functions[t.func]
            if any(s is Sort.RAT for s in sig.args) or sig.result is Sort.RAT:
                raise UnsupportedFeature(f"{t.func} ranges over QQ")
            args = []
            for a, s in zip(t.args, sig.args):
                args.append(self.term(a, solver_sort(s)))
            return f"({symbol(t.func)} {' '.join(args)})"
        if isinstance(t, Neg):
            return f"(- {self.term(t.arg, ty)})"
        if isinstance(t, (Add, Sub)):
            op = "+" if isinstance(t, Add) else "-"
            return f"({op} {self.term(t.left, ty)} {self.term(t.right, ty)})"
        if isinstance(t, Mul):
            if not (_is_constant(t.left) or _is_constant(t.right)):
                self.nonlinear = True
            return f"(* {self.term(t.left, ty)} {self.term(t.right, ty)})"
        if isinstance(t, Div):
            if not _is_constant(t.right):
                self.nonlinear = True
            return f"(/ {self.term(t.left, 'Real')} {self.term(t.right, 'Real')})"
        if isinstance(t, Pow):
            k = self._literal_exponent(t)
            base_ty = self.type_of(t.base) if k >= 0 else "Real"
            base = self.term(t.base, base_ty)
            n = abs(k)
            if n >= 2 and not _is_constant(t.base):
                self.nonlinear = True
            if n == 0:
                power = "1" if base_ty == "Int" else _real_literal(Fraction(1))
            elif n == 1:
                power = base
            else:
                power = "(* " + " ".join([base] * n) + ")"
            if k >= 0:
                return power
            if not _is_constant(t.base):
                self.nonlinear = True
            return f"(/ {_real_literal(Fraction(1))} {power})"
        raise UnsupportedFeature(f"cannot encode {t!r}")

    # formulas
    def membership(self, term: str, ty: str, sort: Sort) -> str:
        if sort is Sort.REAL:
            return "true"
        if sort is Sort.RAT:
            if ty == "Int":
                return "true"
            raise UnsupportedFeature("membership in QQ is not expressible in the solver logics")
        if ty == "Int":
            return f"(>= {term} 0)" if sort is Sort.NAT else "true"
        self.types_used.add("Int")
        if sort is Sort.NAT:
            return f"(and (is_int {term}) (>= {term} {_real_literal(Fraction(0))}))"
        return f"(is_int {term})"

    def formula(self, f: Formula) -> str:
        if isinstance(f, Rel):
            a, b = self.type_of(f.left), self.type_of(f.right)
            ty = "Int" if a == b == "Int" else "Real"
            left, right = self.term(f.left, ty), self.term(f.right, ty)
            if f.op == "!=":
                return f"(not (= {left} {right}))"
            return f"({f.op} {left} {right})"
        if isinstance(f, Member):
            ty = self.type_of(f.term)
            return self.membership(self.term(f.term), ty, f.sort)
        if isinstance(f, Bool):
            return "true" if f.value else "false"
        if isinstance(f, Not):
            return f"(not {self.formula(f.arg)})"
        if isinstance(f, (And, Or, Implies)):
            op = {And: "and", Or: "or", Implies: "=>"}[type(f)]
            return f"({op} {self.formula(f.left)} {self.formula(f.right)})"
        if isinstance(f, (Forall, Exists)):
            if f.sort is Sort.RAT:
                raise UnsupportedFeature("quantification over QQ is not expressible")
            if f.var in self.sorts.functions:
                raise SortClash(f"{f.var} is bound as a variable but also used as a function")
            self.quantified = True
            ty = solver_sort(f.sort)
            self.types_used.add(ty)
            self.bound.append((f.var, f.sort))
            try:
                body = self.formula(f.body)
            finally:
                self.bound.pop()
            v = symbol(f.var)
            if f.sort is Sort.NAT:
                if isinstance(f, Forall):
                    body = f"(=> (>= {v} 0) {body})"
                else:
                    body = f"(and (>= {v} 0) {body})"
            q = "forall" if isinstance(f, Forall) else "exists"
            return f"({q} (({v} {ty})) {body})"
        raise UnsupportedFeature(f"cannot encode {f!r}")


def _logic(enc: _Encoder, uninterpreted: bool) -> str:
    prefix = "" if enc.quantified else "QF_"
    uf = "UF" if uninterpreted else ""
    arith = "N" if enc.nonlinear else "L"
    types = enc.types_used or {"Real"}
    kind = "IRA" if types == {"Int", "Real"} else ("IA" if types == {"Int"} else "RA")
    return f"{prefix}{uf}{arith}{kind}"


def to_smtlib(j: Judgment, timeout_ms: int = DEFAULT_TIMEOUT_MS,
              sorts: SortMap | None = None, axioms: bool = True) -> SmtScript:
    """Encode ``premises /\\ definitions /\\ ~conclusion``.

    Natural-number symbols get ``>= 0`` guards, each definition contributes
    its first-order formula, a range guard and ground instances for small
    literal arguments. With ``axioms=False`` only the ground instances are
    kept, which yields a quantifier-free (weaker) script.
    """
    sorts = sorts or infer_sorts(j)
    enc = _Encoder(sorts)
    decls: list[str] = []
    guards: list[str] = []
    for name in sorted(sorts.variables):
        s = sorts.variables[name]
        ty = solver_sort(s)
        enc.types_used.add(ty)
        decls.append(f"(declare-fun {symbol(name)} () {ty})")
        if s is Sort.NAT:
            guards.append(f"(>= {symbol(name)} 0)")
    for name in sorted(sorts.functions):
        sig = sorts.functions[name]
        if Sort.RAT in sig.args or sig.result is Sort.RAT:
            raise UnsupportedFeature(f"{name} ranges over QQ")
        args = " ".join(solver_sort(s) for s in sig.args)
        decls.append(f"(declare-fun {symbol(name)} ({args}) {solver_sort(sig.result)})")
        for s in sig.args:
            enc.types_used.add(solver_sort(s))
        enc.types_used.add(solver_sort(sig.result))

    assertions: list[str] = list(guards)
    definitions = j.all_definitions()
    for d in definitions if axioms else ():
        assertions.append(enc.formula(desugar_definition(d)))
        if d.result_sort is Sort.NAT:
            params = [(f"x{i}", s) for i, s in enumerate(d.arg_sorts)]
            call = f"({symbol(d.name)} {' '.join(p for p, _ in params)})"
            conds = [f"(>= {p} 0)" for p, s in params if s is Sort.NAT]
            binders = " ".join(f"({p} {solver_sort(s)})" for p, s in params)
            inner = f"(>= {call} 0)"
            if conds:
                cond = conds[0] if len(conds) == 1 else f"(and {' '.join(conds)})"
                inner = f"(=> {cond} {inner})"
            assertions.append(f"(forall ({binders}) {inner})")
            enc.quantified = True
    premises = j.premise_formulas()
    for p in premises:
        assertions.append(enc.formula(p))
    for inst in ground_instances(definitions, premises + [j.conclusion.body]):
        assertions.append(enc.formula(inst))
    assertions.append(f"(not {enc.formula(j.conclusion.body)})")

    logic = _logic(enc, bool(sorts.functions))
    mixed = logic.endswith("IRA")
    assertions = [_finish_literals(a, mixed) for a in assertions]
    return SmtScript(logic, tuple(decls), tuple(assertions), True, timeout_ms)


def judgment_is_replayable(j: Judgment) -> bool:
    """Whether a model can be checked by exact evaluation (no quantifiers)."""
    return not any(has_quantifier(f) for f in j.premise_formulas() + [j.conclusion.body])


def free_symbols(j: Judgment) -> set[str]:
    out: set[str] = set()
    for f in j.premise_formulas() + [j.conclusion.body]:
        out |= free_variables(f)
    return out
