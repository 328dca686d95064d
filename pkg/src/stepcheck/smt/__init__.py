"""SMT-LIB encoding of judgments and the external solver driver."""

from .encode import SmtScript, ground_instances, to_smtlib
from .entail import check_entailment, replay_model
from .solver import (
    OutcomeCache, OutcomeKind, SolverConfig, SolverOutcome, SolverPool, run_solver,
)
from .sorts import FunctionSig, SortMap, infer_sorts, solver_sort

__all__ = [
    "FunctionSig", "OutcomeCache", "OutcomeKind", "SmtScript", "SolverConfig",
    "SolverOutcome", "SolverPool", "SortMap", "check_entailment", "ground_instances",
    "infer_sorts", "replay_model", "run_solver", "solver_sort", "to_smtlib",
]
