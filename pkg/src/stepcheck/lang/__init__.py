"""SimpleMath: syntax, parser, printer and definition desugaring."""

from .ast import (
    Add, And, App, Bool, Branch, Definition, Div, Exists, FALSE, Forall,
    Formula, Implies, Member, Mul, Neg, Not, Num, Or, Pow, Rel, Sort, Sub,
    TRUE, Term, Var, conjoin, conjuncts, disjoin, disjuncts,
)
from .desugar import desugar_definition, guard_lints
from .parser import parse_definition, parse_formula, parse_term, tokenize
from .printer import pretty, print_definition, print_formula, print_term
from .serialize import from_json, to_json
from .transform import (
    ac_normalize, free_variables, functions_used, substitute, substitute_term,
    term_free_vars,
)

__all__ = [
    "Add", "And", "App", "Bool", "Branch", "Definition", "Div", "Exists",
    "FALSE", "Forall", "Formula", "Implies", "Member", "Mul", "Neg", "Not",
    "Num", "Or", "Pow", "Rel", "Sort", "Sub", "TRUE", "Term", "Var",
    "conjoin", "conjuncts", "disjoin", "disjuncts", "desugar_definition",
    "guard_lints", "parse_definition", "parse_formula", "parse_term",
    "tokenize", "pretty", "print_definition", "print_formula", "print_term",
    "from_json", "to_json", "ac_normalize", "free_variables",
    "functions_used", "substitute", "substitute_term", "term_free_vars",
]
