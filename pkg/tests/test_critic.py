import json
import random
import shutil
from pathlib import Path

import pytest

from stepcheck.context import parse_context
from stepcheck.critic import (
    Critic, CriticConfig, Overall, Route, cas_leg, classify_judgment, exact_leg,
    make_feedback, select_solution, verify_context, verify_judgment,
)
from stepcheck.graph import Judgment, build_graph, cost_metrics
from stepcheck.lang import parse_definition, parse_formula
from stepcheck.smt import SolverConfig
from stepcheck.verdict import Status

pytestmark = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 executable not on PATH")

FIXTURES = Path(__file__).parent / "fixtures"
P = parse_formula
FIB = parse_definition("definition(f): NN -> NN f(n) := f(n-1) + f(n-2), if n >= 3"
                       " | 1, if n = 2 | 1, if n = 1")


def J(premises, conclusion, definitions=()):
    return Judgment.from_formulas([P(p) for p in premises], P(conclusion), list(definitions))


def load(name):
    return parse_context((FIXTURES / name).read_text())


# -- routing -----------------------------------------------------------------------------


@pytest.mark.parametrize("premises, conclusion, route", [
    ([], "2 + 2 = 4", Route.ARITHMETIC),
    (["y = (x + 1)^2"], "y = x^2 + 2*x + 1", Route.ALGEBRAIC),
    (["x > 2"], "x > 1", Route.LOGICAL),
    ([], "forall x in RR, x^2 >= 0", Route.LOGICAL),
])
def test_classify(premises, conclusion, route):
    assert classify_judgment(J(premises, conclusion)) is route


# -- verify_judgment ---------------------------------------------------------------------


def test_algebraic_identity_is_valid_via_cas():
    v = verify_judgment(J(["y = (x + 1)^2"], "y = x^2 + 2*x + 1"))
    assert v.status is Status.VALID and v.tool == "cas"


def test_logical_refutation_comes_with_a_model():
    v = verify_judgment(J(["x > 1"], "x > 2"))
    assert v.status is Status.INVALID and v.tool == "smt"
    assert v.counterexample and "x" in v.counterexample


def test_wrong_fibonacci_value_reports_true_value():
    v = verify_judgment(J([], "f(4) = 5", [FIB]))
    assert v.status is Status.INVALID
    assert "f(4) = 3" in v.reason


def test_arithmetic_error_detected_exactly():
    v = verify_judgment(J([], "3 * 7 = 20"))
    assert (v.status, v.tool) == (Status.INVALID, "exact")
    assert verify_judgment(J([], "1/3 + 1/6 = 1/2")).status is Status.VALID


def test_exact_leg_uses_forced_values():
    assert exact_leg(J(["x = 2", "y = x + 3"], "x * y = 10")).status is Status.VALID
    v = exact_leg(J(["x = 2", "y = x + 3"], "x * y = 11"))
    assert v.status is Status.INVALID and v.counterexample == {"x": "2", "y": "5"}
    assert exact_leg(J(["x > 2"], "x > 1")).status is Status.UNKNOWN


def test_exact_leg_abstains_on_unconstrained_premises():
    assert exact_leg(J(["x = 1", "z > 0"], "x = 2")).status is Status.UNKNOWN


def test_cas_leg_refutes_only_with_replayed_witness():
    v = cas_leg(J(["y = (x + 1)^2"], "y = x^2 + 1"))
    assert v.status is Status.INVALID and v.replayed
    # x*x = x holds exactly at 0 and 1, so the premise pins x to those points.
    v = cas_leg(J(["x * x = x", "y = x^2"], "y = x"))
    assert v.status is not Status.INVALID
    assert cas_leg(J(["x > 0"], "x > 1")).status is Status.UNKNOWN


def test_cas_leg_respects_membership():
    v = cas_leg(J(["n in NN", "m = n^2"], "m = n"))
    assert v.status is Status.INVALID
    n = int(v.counterexample["n"])
    assert n >= 2


def test_fall_through_records_every_leg():
    v = verify_judgment(J(["x > 2", "y = x"], "y > 1"))
    assert v.status is Status.VALID
    assert [leg[0] for leg in v.legs] == ["smt"]
    v = verify_judgment(J(["x >= 1"], "x^2 >= x"))
    assert [leg[0] for leg in v.legs][0] == "smt"


def test_tool_failure_becomes_unknown_leg():
    critic = Critic(CriticConfig(solver=SolverConfig(path="no-such-solver-binary")))
    v = critic.verify_judgment(J(["x > 2"], "x > 1"))
    assert v.status is Status.UNKNOWN
    assert "smt" in v.reason and "cas" in v.reason


# -- verify_context --------------------------------------------------------------------


def test_square_root_report_lists_corollary():
    report = verify_context(load("square_root.ctx"))
    assert report.overall is Overall.ALL_VALID
    cors = [c.corollary for c in report.corollaries]
    assert [(c.foundation, c.conclusion) for c in cors] == [((0,), 2)]
    assert report.corollaries[0].derivable


def test_seeded_error_reports_first_invalid():
    text = (FIXTURES / "square_root.ctx").read_text().replace("x^2 = 4", "x^2 = 5")
    report = verify_context(parse_context(text))
    assert report.overall is Overall.HAS_INVALID and report.first_invalid == 1
    assert report.exit_code == 1
    assert len(report.results) == 2       # evaluation continues past the failure


def test_timeout_fixture_is_inconclusive():
    ctx = load("hard_timeout.ctx")
    report = verify_context(ctx, CriticConfig(solver=SolverConfig(timeout_ms=800)))
    assert report.overall is Overall.INCONCLUSIVE and report.exit_code == 2
    assert report.verdicts[1].status is Status.UNKNOWN


def test_theorems_are_trusted():
    ctx = parse_context("0 | THEOREM: forall x in RR, x^2 >= 0\n"
                        "1 | FACT: y = 3\n"
                        "2 | CONCLUSION[1]: y^2 = 9\n")
    report = verify_context(ctx)
    assert report.trusted == (0,)
    assert report.overall is Overall.ALL_VALID


def test_discharged_assumption():
    report = verify_context(load("discharge.ctx"))
    assert report.overall is Overall.ALL_VALID


def test_fibonacci_context():
    report = verify_context(load("fib_small.ctx"))
    assert report.overall is Overall.ALL_VALID
    assert report.results[0].definitions == ()     # cited, so a premise
    assert report.results[0].premises == (1,)


def test_report_json_is_complete_and_order_independent():
    ctx = load("fib_small.ctx")
    serial = verify_context(ctx, CriticConfig(workers=1)).to_json()
    parallel = verify_context(ctx, CriticConfig(workers=4)).to_json()
    assert json.dumps(serial, sort_keys=True) == json.dumps(parallel, sort_keys=True)
    assert serial["schema_version"] == 1
    assert [j["id"] for j in serial["judgments"]] == [2, 3]


def test_report_completeness_and_cost_accounting():
    for name in ["square_root.ctx", "fib_small.ctx", "discharge.ctx", "hard_timeout.ctx"]:
        ctx = load(name)
        report = verify_context(ctx, CriticConfig(solver=SolverConfig(timeout_ms=500)))
        assert len(report.results) == len(ctx.conclusions)
        assert report.premises_submitted == cost_metrics(build_graph(ctx)).C2


def test_empty_context_is_all_valid():
    report = verify_context(parse_context(""))
    assert report.overall is Overall.ALL_VALID and report.results == ()


class _Explainer:
    def __init__(self):
        self.prompts = []

    def complete(self, prompt):
        self.prompts.append(prompt)
        return "Because 3 times 7 is 21."


def test_explainer_hook_only_adds_prose():
    ctx = parse_context("0 | FACT: x = 3\n1 | CONCLUSION[0]: 7 * x = 20\n")
    hook = _Explainer()
    report = verify_context(ctx, explainer=hook)
    assert report.overall is Overall.HAS_INVALID
    assert len(hook.prompts) == 1
    fb = make_feedback(report)
    assert fb[0].explanation == "Because 3 times 7 is 21."
    assert "Explanation" in fb[0].render()


# -- feedback and selection ---------------------------------------------------------------


def test_feedback():
    assert make_feedback(verify_context(load("square_root.ctx"))) == []
    ctx = parse_context("0 | FACT: x = 2\n"
                        "1 | CONCLUSION[0]: x^2 = 5 // Squaring gives 5.\n"
                        "2 | CONCLUSION[0]: x + 1 = 3\n"
                        "3 | CONCLUSION[0]: x^3 = 9 // Cubing gives 9.\n")
    fb = make_feedback(verify_context(ctx))
    assert [f.statement_id for f in fb] == [1, 3]
    text = fb[0].render()
    assert "Squaring gives 5." in text and "x^2 = 5" in text and "Reason:" in text
    assert fb[0].counterexample == {"x": "2"}


def _report(text):
    ctx = parse_context(text)
    return ctx, verify_context(ctx)


def test_select_solution():
    long_ok = _report("0 | FACT: x = 2\n" + "".join(
        f"{i} | CONCLUSION[0]: x + {i} = {2 + i}\n" for i in range(1, 7)))
    short_ok = _report("0 | FACT: x = 2\n" + "".join(
        f"{i} | CONCLUSION[0]: x * {i} = {2 * i}\n" for i in range(1, 5)))
    bad = _report("0 | FACT: x = 2\n1 | CONCLUSION[0]: x = 3\n")
    assert len(long_ok[0]) == 7 and len(short_ok[0]) == 5
    assert select_solution([bad, long_ok, short_ok]) == 2
    assert select_solution([bad]) is None
    assert select_solution([short_ok, short_ok]) == 0
    assert select_solution([(bad[0], None)]) is None


# -- monotonicity under premise strengthening -----------------------------------------------


def _linear(rng, names):
    coeffs = " + ".join(f"{rng.randint(1, 3)}*{v}" for v in rng.sample(names, rng.randint(1, 2)))
    return f"{coeffs} {rng.choice(['=', '<', '<=', '>', '>=', '!='])} {rng.randint(-5, 5)}"


def test_adding_premises_never_turns_valid_into_invalid():
    rng = random.Random(3)
    critic = Critic(CriticConfig(workers=1))
    for _ in range(40):
        names = ["a", "b"]
        base = [_linear(rng, names) for _ in range(rng.randint(0, 2))]
        conclusion = _linear(rng, names)
        before = critic.verify_judgment(J(base, conclusion))
        after = critic.verify_judgment(J(base + [_linear(rng, names)], conclusion))
        if before.status is Status.VALID:
            assert after.status is not Status.INVALID, (base, conclusion)
