"""Exact algebra: evaluation, polynomial normal forms, equivalence and roots."""

from .engine import (
    EquivVerdict, QuadraticSurd, derivative_nf, differentiate, equiv,
    sample_points, solve_univariate,
)
from .evaluate import Evaluator, eval_exact, holds, in_sort
from .normal import PolyNormalForm, normalize, to_term
from .poly import Poly, gcd

__all__ = [
    "EquivVerdict", "Evaluator", "Poly", "PolyNormalForm", "QuadraticSurd",
    "derivative_nf", "differentiate", "equiv", "eval_exact", "gcd", "holds",
    "in_sort", "normalize", "sample_points", "solve_univariate", "to_term",
]
