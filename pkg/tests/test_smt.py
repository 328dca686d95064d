import random
import shutil
from fractions import Fraction

import pytest

from oracles import generate_bounded_judgment, valid_by_enumeration
from stepcheck.cas import holds
from stepcheck.errors import SortClash
from stepcheck.graph import Judgment
from stepcheck.lang import Sort, parse_definition, parse_formula
from stepcheck.smt import (
    OutcomeCache, OutcomeKind, SolverConfig, SolverPool, check_entailment,
    ground_instances, infer_sorts, run_solver, to_smtlib,
)
from stepcheck.smt.encode import SmtScript
from stepcheck.verdict import Status

pytestmark = pytest.mark.skipif(shutil.which("z3") is None, reason="z3 executable not on PATH")

P = parse_formula
FIB = parse_definition("definition(f): NN -> NN f(n) := f(n-1) + f(n-2), if n >= 3"
                       " | 1, if n = 2 | 1, if n = 1")


def J(premises, conclusion, definitions=()):
    return Judgment.from_formulas([P(p) for p in premises], P(conclusion), list(definitions))


# -- infer_sorts -----------------------------------------------------------------------


def test_fibonacci_sorts():
    sorts = infer_sorts(J(["n in NN"], "f(n) = f(n - 1) + f(n - 2)", [FIB]))
    assert sorts.variables == {"n": Sort.NAT}
    sig = sorts.functions["f"]
    assert (sig.args, sig.result, sig.defined) == ((Sort.NAT,), Sort.NAT, True)


def test_default_real_and_join():
    assert infer_sorts(J(["x > 0"], "x > -1")).variables == {"x": Sort.REAL}
    sorts = infer_sorts(J(["n in NN", "n in ZZ /\\ n > 2"], "n > 1"))
    assert sorts.variables == {"n": Sort.INT}


def test_sort_clashes():
    with pytest.raises(SortClash):
        infer_sorts(J(["f(1) = 2"], "f(1, 2) = 3"))
    with pytest.raises(SortClash):
        infer_sorts(J(["f = 2"], "f(1) = 2"))
    with pytest.raises(SortClash):
        infer_sorts(J([], "f(1, 2) = 1", [FIB]))


# -- to_smtlib ---------------------------------------------------------------------------


def test_script_for_simple_entailment():
    s = to_smtlib(J(["x > 2"], "x > 1"))
    assert s.assertions == ("(> x 2)", "(not (> x 1))")
    assert s.logic == "QF_LRA"
    assert "(declare-fun x () Real)" in s.declarations


def test_script_for_fibonacci_definition():
    s = to_smtlib(J([], "f(4) = 3", [FIB]))
    text = s.text()
    assert "(declare-fun f (Int) Int)" in text
    assert any(a.startswith("(forall ((n Int))") for a in s.assertions)
    assert s.assertions[-1] == "(not (= (f 4) 3))"
    assert "(= (f 4) (+ (f 3) (f 2)))" in s.assertions


def test_ground_instances_close_over_recursion():
    insts = ground_instances([FIB], [P("f(5) = 5")])
    assert [str(i.left.args[0].value) for i in insts] == ["5", "4", "3", "2", "1"]


def test_uninterpreted_function_is_declared():
    s = to_smtlib(J(["g(x) = 1"], "g(x) + 1 = 2"))
    assert "(declare-fun g (Real) Real)" in s.declarations
    assert s.logic == "QF_UFLRA"


def test_natural_guards_and_mixed_logic():
    s = to_smtlib(J(["n in NN", "x > n"], "x > -1"))
    assert "(declare-fun n () Int)" in s.declarations
    assert "(>= n 0)" in s.assertions
    assert s.logic == "QF_LIRA"
    assert "(> x (to_real n))" in s.assertions


def test_scripts_are_deterministic():
    a = to_smtlib(J(["y = 2 * x", "x in ZZ"], "y != 3")).text(seed=1)
    b = to_smtlib(J(["y = 2 * x", "x in ZZ"], "y != 3")).text(seed=1)
    assert a == b


def test_reserved_names_are_quoted():
    s = to_smtlib(J(["div > 1"], "div > 0"))
    assert "(declare-fun |div| () Real)" in s.declarations


def test_quantification_over_rationals_is_unsupported():
    v = check_entailment(J(["forall q in QQ, q * 0 = 0"], "1 = 1"))
    assert v.status is Status.UNKNOWN and "unsupported" in v.reason


# -- run_solver --------------------------------------------------------------------------


def test_run_solver_unsat_and_sat():
    assert run_solver(to_smtlib(J(["x > 2"], "x > 1"))).kind is OutcomeKind.UNSAT
    out = run_solver(to_smtlib(J(["x > 1"], "x > 2")))
    assert out.kind is OutcomeKind.SAT
    assert "x" in out.model


def test_run_solver_timeout():
    script = to_smtlib(J(["x in ZZ", "y in ZZ", "z in ZZ"], "x^3 + y^3 + z^3 != 4"),
                       timeout_ms=800)
    out = run_solver(script)
    assert (out.kind, out.reason) == (OutcomeKind.UNKNOWN, "timeout")


def test_solver_error_is_reported():
    bad = SmtScript("QF_LRA", ("(declare-fun x () Real)",), ("(> undeclared_y 1)",))
    out = run_solver(bad)
    assert out.kind is OutcomeKind.ERROR and "error" in out.reason
    missing = run_solver(bad, SolverConfig(path="no-such-solver-binary"))
    assert missing.kind is OutcomeKind.ERROR


def test_solver_error_becomes_unknown_verdict():
    v = check_entailment(J(["x > 2"], "x > 1"), SolverConfig(path="no-such-solver-binary"))
    assert v.status is Status.UNKNOWN and v.reason.startswith("solver-error")


def test_cache_and_artifacts(tmp_path):
    cache = OutcomeCache()
    config = SolverConfig(artifact_dir=tmp_path)
    script = to_smtlib(J(["x > 2"], "x > 1"))
    first = run_solver(script, config, cache)
    second = run_solver(script, config, cache)
    assert first == second and cache.hits == 1
    files = list(tmp_path.glob("*.smt2"))
    assert [f.stem for f in files] == [script.digest()]
    assert "(check-sat)" in files[0].read_text()


# -- check_entailment ----------------------------------------------------------------------


def test_entailment_examples():
    assert check_entailment(J(["x > 2"], "x > 1")).status is Status.VALID
    v = check_entailment(J(["x > 1"], "x > 2"))
    assert v.status is Status.INVALID and v.replayed
    x = Fraction(v.counterexample["x"])
    assert 1 < x <= 2
    assert "premises hold but conclusion fails" in v.reason
    assert check_entailment(J(["n in NN"], "f(4) = 3", [FIB])).status is Status.VALID


def test_wrong_fibonacci_value_names_the_true_one():
    v = check_entailment(J([], "f(4) = 5", [FIB]))
    assert v.status is Status.INVALID
    assert v.counterexample["f(4)"] == "3"


def test_invalid_with_uninterpreted_function_replays():
    v = check_entailment(J(["g(x) = 2", "x = 1"], "g(1) = 3"))
    assert v.status is Status.INVALID and v.replayed
    assert v.counterexample["g(1)"] == "2"


# -- oracle: exhaustive enumeration on bounded integers -------------------------------------


def test_entailment_agrees_with_enumeration():
    rng = random.Random(7)
    pool = SolverPool(SolverConfig(timeout_ms=5000, pool_size=1))
    decided = unknown = 0
    for _ in range(200):
        names, premises, conclusion = generate_bounded_judgment(rng)
        j = Judgment.from_formulas(premises, conclusion)
        verdict = check_entailment(j, pool)
        if verdict.status is Status.UNKNOWN:
            unknown += 1
            continue
        decided += 1
        expected = valid_by_enumeration(names, premises, conclusion)
        assert (verdict.status is Status.VALID) == expected, (premises, conclusion)
        if verdict.status is Status.INVALID:
            env = {n: Fraction(verdict.counterexample[n]) for n in names}
            assert all(holds(p, env) for p in premises) and not holds(conclusion, env)
    assert unknown <= 10
