from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stepcheck.errors import ArityError, CaptureError, ParseError
from stepcheck.lang import (
    Add, And, App, Bool, Branch, Definition, Div, Exists, Forall, Implies,
    Member, Mul, Neg, Not, Num, Or, Pow, Rel, Sort, Sub, TRUE, Var,
    ac_normalize, desugar_definition, free_variables, from_json, guard_lints,
    parse_definition, parse_formula, parse_term, print_definition,
    print_formula, print_term, substitute, to_json,
)
from stepcheck.cas.evaluate import eval_exact, holds

FIB_TEXT = """definition(f): NN -> NN
f(n) := f(n-1) + f(n-2), if n >= 3 ;
  | 1, if n = 2 ;
  | 1, if n = 1 ;"""

n, x, y = Var("n"), Var("x"), Var("y")
one, two = Num(1), Num(2)


def f_(arg):
    return App("f", (arg,))


# -- parse_formula ----------------------------------------------------------


def test_parse_quantified_recurrence():
    got = parse_formula("forall n, n in NN -> f(n) = f(n-1) + f(n-2)")
    assert got == Forall("n", Sort.NAT, Implies(
        Member(n, Sort.NAT),
        Rel("=", f_(n), Add(f_(Sub(n, one)), f_(Sub(n, two))))))


def test_parse_trivial_identity():
    assert parse_formula("1 = 1") == Rel("=", one, one)


def test_malformed_reports_offending_token():
    with pytest.raises(ParseError) as info:
        parse_formula("x + * 2")
    err = info.value
    assert err.token == "*"
    assert (err.line, err.column) == (1, 5)
    assert "number" in err.expected


@pytest.mark.parametrize("text", [
    "", "x", "x = ", "(x = 1", "forall , x = 1", "x = 1 = 2", "x ^ 2 ^ 3 = 1",
    "x @ 1", "1 = 1 /\\", "f(x = 1",
])
def test_malformed_inputs_raise_parse_error(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_precedence():
    assert parse_term("-x^2") == Neg(Pow(x, two))
    assert parse_term("1 - 2 - 3") == Sub(Sub(one, two), Num(3))
    assert parse_term("x / 2 * y") == Mul(Div(x, two), y)
    assert parse_term("x^-1") == Pow(x, Neg(one))
    f = parse_formula("~x = 1 /\\ y = 2 \\/ x < y -> y > 0 -> x > 0")
    assert isinstance(f, Implies) and isinstance(f.right, Implies)
    assert isinstance(f.left, Or) and isinstance(f.left.left, And)
    assert isinstance(f.left.left.left, Not)


def test_parenthesized_term_versus_formula():
    assert parse_formula("(x + 1)^2 = 4") == Rel("=", Pow(Add(x, one), two), Num(4))
    assert parse_formula("(x > 1) /\\ y = 2") == And(Rel(">", x, one), Rel("=", y, two))
    assert parse_formula("((x)) = 1") == Rel("=", x, one)


def test_decimal_literals_are_exact():
    assert parse_term("0.1") == Num(Fraction(1, 10))


def test_explicit_and_implied_quantifier_sorts():
    assert parse_formula("forall k in ZZ, k = k").sort is Sort.INT
    assert parse_formula("exists k, k = k").sort is Sort.REAL


# -- definitions ----------------------------------------------------------------


def fib_definition():
    return Definition("f", ("n",), (Sort.NAT,), Sort.NAT, (
        Branch(Add(f_(Sub(n, one)), f_(Sub(n, two))), Rel(">=", n, Num(3))),
        Branch(one, Rel("=", n, two)),
        Branch(one, Rel("=", n, one)),
    ))


def test_parse_fibonacci_definition():
    assert parse_definition(FIB_TEXT) == fib_definition()


def test_unguarded_single_branch():
    d = parse_definition("definition(g): NN -> NN  g(n) := n")
    assert d == Definition("g", ("n",), (Sort.NAT,), Sort.NAT, (Branch(n, TRUE),))


def test_missing_arrow_in_signature():
    with pytest.raises(ParseError) as info:
        parse_definition("definition(h): NN  h(n) := 1")
    assert "'->'" in info.value.expected


def test_branch_arity_mismatch():
    with pytest.raises(ArityError):
        parse_definition("definition(h): NN -> NN h(n) := 1, if n = 0 | h(a, b) := 2")
    with pytest.raises(ArityError):
        parse_definition("definition(h): NN, NN -> NN h(n) := 1")


def test_restated_heads_are_renamed():
    d = parse_definition("definition(h): ZZ -> ZZ h(n) := 0, if n < 0 | h(m) := m, if m >= 0")
    assert d.branches[1] == Branch(n, Rel(">=", n, Num(0)))


def test_definition_round_trip():
    d = fib_definition()
    assert parse_definition(print_definition(d)) == d


# -- desugaring -------------------------------------------------------------------


def test_fibonacci_desugars_to_first_order_formula():
    expected = parse_formula(
        "forall n, n in NN -> ((n = 1 \\/ n = 2) -> f(n) = 1) /\\ "
        "(n >= 3 -> f(n) = f(n - 1) + f(n - 2))")
    assert ac_normalize(desugar_definition(fib_definition())) == ac_normalize(expected)


def test_single_unconditional_branch():
    d = Definition("g", ("n",), (Sort.NAT,), Sort.NAT, (Branch(n, TRUE),))
    assert desugar_definition(d) == parse_formula("forall n, n in NN -> g(n) = n")


def test_desugar_agrees_with_branch_dispatch():
    # oracle: the formula forces g(k) to exactly the value branch dispatch picks
    d = parse_definition("definition(g): NN -> NN g(n) := 7, if n = 0 | 2 * n + 1, if n >= 1")
    formula = desugar_definition(d)
    assert isinstance(formula, Forall)
    for k in range(6):
        dispatched = 7 if k == 0 else 2 * k + 1
        instance = substitute(formula.body, "n", Num(k))
        for candidate in range(0, 15):
            table = {"g": {(Fraction(k),): Fraction(candidate)}}
            assert holds(instance, {}, table) == (candidate == dispatched)
        assert eval_exact(App("g", (Num(k),)), {}, {"g": d}) == dispatched


def test_guard_lints_report_gap_and_overlap():
    rules = {lint.rule for lint in guard_lints(fib_definition())}
    assert rules == {"guard-gap"}            # n = 0 is not covered
    d = parse_definition("definition(h): ZZ -> ZZ h(n) := 1, if n >= 0 | 2, if n <= 0")
    assert {lint.rule for lint in guard_lints(d)} == {"guard-overlap"}
    total = parse_definition("definition(h): ZZ -> ZZ h(n) := 1, if n >= 0 | 2, if n < 0")
    assert guard_lints(total) == []


# -- printing ------------------------------------------------------------------------


def test_print_identity():
    assert print_formula(Rel("=", one, one)) == "1 = 1"


def test_print_minimal_parentheses():
    a, b, c = (Rel("=", Var(v), one) for v in "abc")
    assert print_formula(Implies(Implies(a, b), c)) == "(a = 1 -> b = 1) -> c = 1"
    assert print_formula(Implies(a, Implies(b, c))) == "a = 1 -> b = 1 -> c = 1"
    assert print_formula(And(Or(a, b), c)) == "(a = 1 \\/ b = 1) /\\ c = 1"
    assert print_formula(Or(And(a, b), c)) == "a = 1 /\\ b = 1 \\/ c = 1"
    assert print_term(Sub(x, Sub(y, one))) == "x - (y - 1)"
    assert print_term(Pow(Neg(x), two)) == "(-x)^2"
    assert print_formula(And(Forall("x", Sort.REAL, a), b)) == "(forall x, a = 1) /\\ b = 1"
    assert print_formula(And(b, Forall("x", Sort.REAL, a))) == "b = 1 /\\ forall x, a = 1"


def test_desugared_fibonacci_round_trips():
    f = desugar_definition(fib_definition())
    assert parse_formula(print_formula(f)) == f


# -- free variables and substitution ------------------------------------------------


def test_free_variables():
    assert free_variables(parse_formula("forall n, f(n) = x")) == {"x"}
    assert free_variables(parse_formula("1 = 1")) == set()
    assert free_variables(parse_formula("x > 0 /\\ exists x, x < 0")) == {"x"}


def test_substitute():
    assert substitute(parse_formula("f(n) = 1"), "n", two) == parse_formula("f(2) = 1")
    bound = parse_formula("forall n, f(n) = n")
    assert substitute(bound, "n", Num(5)) == bound
    with pytest.raises(CaptureError):
        substitute(parse_formula("exists y, x < y"), "x", Add(y, one))


# -- JSON --------------------------------------------------------------------------


def test_json_round_trip():
    d = fib_definition()
    assert from_json(to_json(d)) == d
    f = desugar_definition(d)
    assert from_json(to_json(f)) == f


# -- property tests -------------------------------------------------------------------

names = st.sampled_from(["x", "y", "n", "k"])
literals = st.one_of(
    st.integers(0, 1000).map(Num),
    st.integers(1, 999).map(lambda k: Num(Fraction(k, 100))),
)
exponents = st.one_of(
    st.integers(0, 5).map(Num),
    st.integers(1, 3).map(lambda k: Neg(Num(k))),
    names.map(Var),
)


def _terms():
    base = st.one_of(literals, names.map(Var))
    return st.recursive(base, lambda sub: st.one_of(
        st.builds(Add, sub, sub), st.builds(Sub, sub, sub),
        st.builds(Mul, sub, sub), st.builds(Div, sub, sub),
        st.builds(Neg, sub),
        st.builds(Pow, sub, exponents),
        st.builds(lambda a, b: App("g", (a, b)), sub, sub),
    ), max_leaves=8)


terms = _terms()
sorts = st.sampled_from(list(Sort))


def _formulas():
    base = st.one_of(
        st.builds(Rel, st.sampled_from(["=", "!=", "<", "<=", ">", ">="]), terms, terms),
        st.builds(Member, terms, sorts),
        st.booleans().map(Bool),
    )
    return st.recursive(base, lambda sub: st.one_of(
        st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub),
        st.builds(Forall, names, sorts, sub), st.builds(Exists, names, sorts, sub),
    ), max_leaves=6)


formulas = _formulas()


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_formula(print_formula(f)) == f


@settings(max_examples=200, deadline=None)
@given(formulas, names, terms)
def test_substituted_variable_is_gone(f, v, t):
    from stepcheck.lang import term_free_vars

    if v in term_free_vars(t):
        return
    try:
        g = substitute(f, v, t)
    except CaptureError:
        return
    assert v not in free_variables(g)


@settings(max_examples=100, deadline=None)
@given(formulas)
def test_json_round_trip_property(f):
    assert from_json(to_json(f)) == f
