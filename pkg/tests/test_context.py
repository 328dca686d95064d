from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from stepcheck.context import (
    Context, Statement, StatementKind, parse_context, print_context, validate_context,
)
from stepcheck.errors import NestingError, ParseError, PremiseReferenceError, StructureError
from stepcheck.lang import Definition, Num, Rel, Var, parse_formula

FIXTURES = Path(__file__).parent / "fixtures"
K = StatementKind


def rules(ctx):
    return [(d.severity, d.rule, d.statement_id) for d in validate_context(ctx)]


def test_five_kinds():
    assert len(StatementKind) == 5


def test_parse_small_fixture():
    ctx = parse_context((FIXTURES / "fib_small.ctx").read_text())
    assert [s.kind for s in ctx] == [K.FACT, K.DEFINITION, K.CONCLUSION, K.CONCLUSION]
    assert ctx[3].premises == (1, 2)
    assert isinstance(ctx[1].body, Definition)
    assert ctx[2].source_text == "f(3) = f(2) + f(1) = 2."
    assert ctx.problem_text.startswith("Let f be")
    assert validate_context(ctx) == []


def test_empty_input_is_empty_context():
    ctx = parse_context("")
    assert len(ctx) == 0 and validate_context(ctx) == []


def test_dangling_reference():
    text = "0 | FACT: x = 1\n1 | FACT: y = 2\n2 | CONCLUSION[7]: x + y = 3\n"
    with pytest.raises(PremiseReferenceError) as info:
        parse_context(text)
    assert info.value.statement_id == 2
    assert rules(parse_context(text, strict=False)) == [("error", "missing-reference", 2)]


def test_forward_reference():
    text = "0 | FACT: x = 1\n1 | CONCLUSION[2]: x = 1\n2 | FACT: y = 1\n"
    with pytest.raises(PremiseReferenceError):
        parse_context(text)


def test_malformed_formula_reports_file_line():
    with pytest.raises(ParseError) as info:
        parse_context("0 | FACT: x = 1\n1 | FACT: x + * 2 = 1\n")
    assert info.value.line == 2 and info.value.token == "*"


def test_unknown_kind_and_garbage():
    with pytest.raises(ParseError):
        parse_context("0 | LEMMA: x = 1\n")
    with pytest.raises(ParseError):
        parse_context("hello\n0 | FACT: x = 1\n")


def test_continuation_lines_and_comments():
    text = ("# a comment\n0 | DEFINITION: definition(g): NN -> NN g(n) := 0, if n = 0\n"
            "    | g(n-1) + 1, if n >= 1\n1 | CONCLUSION[0]: g(2) = 2\n")
    ctx = parse_context(text)
    assert len(ctx[0].body.branches) == 2


def test_kind_keyword_is_case_insensitive():
    assert parse_context("0 | fact: x = 1\n")[0].kind is K.FACT


# -- validation ----------------------------------------------------------------------


def _ctx(*statements, goal=None):
    return Context(tuple(statements), "", goal)


x_eq = Rel("=", Var("x"), Num(1))


def test_premise_width_lint():
    facts = [Statement(i, K.FACT, Rel("=", Var(f"a{i}"), Num(i))) for i in range(5)]
    c = Statement(5, K.CONCLUSION, x_eq, (0, 1, 2, 3, 4))
    assert rules(_ctx(*facts, c)) == [("lint", "premise-width", 5)]


def test_fact_with_premises():
    ctx = _ctx(Statement(0, K.FACT, x_eq), Statement(1, K.FACT, x_eq, (0,)))
    assert rules(ctx) == [("error", "kind-premise-mismatch", 1)]


def test_conclusion_without_premises():
    assert rules(_ctx(Statement(0, K.CONCLUSION, x_eq))) == [("error", "kind-premise-mismatch", 0)]


def test_id_sequence():
    assert rules(_ctx(Statement(1, K.FACT, x_eq))) == [("error", "id-sequence", 1)]


def test_definition_kind_and_duplicates():
    d = parse_context("0 | DEFINITION: definition(g): NN -> NN g(n) := n\n")[0].body
    ctx = _ctx(Statement(0, K.FACT, d), Statement(1, K.DEFINITION, x_eq),
               Statement(2, K.DEFINITION, d), Statement(3, K.DEFINITION, d))
    got = rules(ctx)
    assert ("error", "definition-kind", 0) in got
    assert ("error", "definition-kind", 1) in got
    assert ("error", "duplicate-definition", 3) in got


def test_arity_conflict():
    text = "0 | FACT: f(1) = 2\n1 | FACT: f(1, 2) = 3\n"
    with pytest.raises(StructureError):
        parse_context(text)
    assert rules(parse_context(text, strict=False)) == [("error", "arity", 1)]


def test_goal_mismatch_is_a_lint():
    text = "@goal: x = 2\n0 | FACT: x = 1\n1 | CONCLUSION[0]: x = 1\n"
    assert rules(parse_context(text)) == [("lint", "goal-mismatch", 1)]


# -- Fitch nesting --------------------------------------------------------------------


def test_discharge_fixture_is_valid():
    ctx = parse_context((FIXTURES / "discharge.ctx").read_text())
    assert [s.depth for s in ctx] == [0, 1, 1, 0]
    assert validate_context(ctx) == []


def test_depth_jump_is_a_nesting_error():
    with pytest.raises(NestingError):
        parse_context("0 | FACT: x = 1\n1 | | FACT: x = 1\n")
    with pytest.raises(NestingError):
        parse_context("0 | | | ASSUMPTION: x = 1\n")


def test_citing_inside_closed_box_needs_discharge():
    bad = ("0 | | ASSUMPTION: x > 2\n1 | | CONCLUSION[0]: x > 1\n"
           "2 | CONCLUSION[1]: x > 1\n")
    with pytest.raises(StructureError) as info:
        parse_context(bad)
    assert info.value.rule == "scope"
    wrong_shape = ("0 | | ASSUMPTION: x > 2\n1 | | CONCLUSION[0]: x > 1\n"
                   "2 | CONCLUSION[0, 1]: x > 1\n")
    assert ("error", "scope", 2) in rules(parse_context(wrong_shape, strict=False))


def test_sibling_boxes_are_not_visible_to_each_other():
    text = ("0 | | ASSUMPTION: x > 2\n1 | | ASSUMPTION: x < 0\n"
            "2 | | CONCLUSION[0]: x > 1\n")
    assert ("error", "scope", 2) in rules(parse_context(text, strict=False))


def test_nested_boxes():
    text = ("0 | | ASSUMPTION: x > 2\n1 | | | ASSUMPTION: y > x\n"
            "2 | | | CONCLUSION[0, 1]: y > 2\n3 | | CONCLUSION[1, 2]: y > x -> y > 2\n"
            "4 | CONCLUSION[0, 3]: x > 2 -> y > x -> y > 2\n")
    assert validate_context(parse_context(text)) == []


# -- printing and JSON ---------------------------------------------------------------


@pytest.mark.parametrize("name", ["fib_small.ctx", "discharge.ctx", "square_root.ctx"])
def test_print_parse_round_trip(name):
    ctx = parse_context((FIXTURES / name).read_text())
    again = parse_context(print_context(ctx))
    assert again == ctx


def test_json_round_trip():
    ctx = parse_context((FIXTURES / "fib_small.ctx").read_text())
    data = ctx.to_json()
    assert data["statements"][3]["premises"] == [1, 2]
    assert data["statements"][1]["kind"] == "Definition"
    assert Context.from_json(data) == ctx


_atoms = st.sampled_from(["x = 1", "y > 2", "x + y <= 3", "2 * x = y", "~x = y"])


@st.composite
def flat_contexts(draw):
    n = draw(st.integers(1, 8))
    statements = []
    for i in range(n):
        body = parse_formula(draw(_atoms))
        if i and draw(st.booleans()):
            premises = tuple(sorted(draw(st.sets(st.integers(0, i - 1), min_size=1))))
            statements.append(Statement(i, K.CONCLUSION, body, premises,
                                        draw(st.sampled_from([None, "by algebra"]))))
        else:
            statements.append(Statement(i, draw(st.sampled_from([K.FACT, K.THEOREM])), body))
    return Context(tuple(statements), draw(st.sampled_from(["", "Solve it."])))


@settings(max_examples=100, deadline=None)
@given(flat_contexts())
def test_round_trip_property(ctx):
    assert parse_context(print_context(ctx), strict=False) == ctx
