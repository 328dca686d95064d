"""Prompt templates that teach a language model the context file format."""

from __future__ import annotations

from ..errors import PromptError, UnknownTemplate

GRAMMAR_BLOCK = """\
GRAMMAR
  term     ::= number | name | name(term, ..., term) | (term)
             | -term | term ^ exponent | term * term | term / term
             | term + term | term - term
  exponent ::= integer | name | -integer
  formula  ::= true | false | term REL term | term in SORT | ~formula
             | formula /\\ formula | formula \\/ formula | formula -> formula
             | forall name [in SORT], formula | exists name [in SORT], formula
  REL      ::= = | != | < | <= | > | >=
  SORT     ::= NN | ZZ | QQ | RR
  definition ::= definition(f): SORT, ..., SORT -> SORT
                 f(x1, ..., xk) := term, if formula | ... | term, if formula
Binding from tightest to loosest: ^, unary -, * and /, + and -, relations
and membership, ~, /\\, \\/, -> (right associative). Quantifiers reach as
far right as possible. Numbers are exact: write 1/3, never 0.333.

CONTEXT FILE
  @problem: <problem text>
  @goal: <formula>                        (optional)
  <id> | KIND[<premise ids>]: <formula> // <original sentence>
Ids count up from 0 with no gaps. Each extra '|' after the id opens one
level of nesting under an Assumption. A Conclusion lists, in brackets, the
ids of the earlier statements it follows from directly; cite at most four.
Only statements at the same or an outer nesting level can be cited, except
that a Conclusion may cite a closed Assumption block directly inside its
own level when its formula is "assumption -> result".
"""

KIND_DEFINITIONS = """\
STATEMENT KINDS
  FACT        a condition given in the problem statement.
  ASSUMPTION  a supposition that opens a nested block (case splits, proof
              by contradiction); it holds only inside that block.
  THEOREM     a known result used without proof, such as a standard identity.
  DEFINITION  introduces a function symbol by guarded cases.
  CONCLUSION  a new claim derived from the statements it cites.
"""

FEW_SHOT = (
    ("Let f be the Fibonacci function with f(1) = f(2) = 1. Compute f(5).",
     "By definition f(3) = f(2) + f(1) = 2. Then f(4) = f(3) + f(2) = 3, "
     "and f(5) = f(4) + f(3) = 5.",
     "@problem: Let f be the Fibonacci function with f(1) = f(2) = 1. Compute f(5).\n"
     "@goal: f(5) = 5\n"
     "0 | DEFINITION: definition(f): NN -> NN f(n) := f(n-1) + f(n-2), if n >= 3"
     " | 1, if n = 2 | 1, if n = 1 // Fibonacci with f(1) = f(2) = 1.\n"
     "1 | CONCLUSION[0]: f(3) = 2 // f(3) = f(2) + f(1) = 2.\n"
     "2 | CONCLUSION[0, 1]: f(4) = 3 // f(4) = f(3) + f(2) = 3.\n"
     "3 | CONCLUSION[0, 1, 2]: f(5) = 5 // f(5) = f(4) + f(3) = 5.\n"),
    ("Given x = 2, show that x^2 + x = 6.",
     "Since x = 2, x^2 = 4. Adding x gives x^2 + x = 4 + 2 = 6.",
     "@problem: Given x = 2, show that x^2 + x = 6.\n"
     "@goal: x^2 + x = 6\n"
     "0 | FACT: x = 2 // Given x = 2.\n"
     "1 | CONCLUSION[0]: x^2 = 4 // Since x = 2, x^2 = 4.\n"
     "2 | CONCLUSION[0, 1]: x^2 + x = 6 // Adding x gives 6.\n"),
    ("Show that if x > 2 then x^2 > 4.",
     "Suppose x > 2. Then x is positive and x^2 > 2x > 4. Hence x > 2 implies x^2 > 4.",
     "@problem: Show that if x > 2 then x^2 > 4.\n"
     "@goal: x > 2 -> x^2 > 4\n"
     "0 | | ASSUMPTION: x > 2 // Suppose x > 2.\n"
     "1 | | CONCLUSION[0]: x > 0 // Then x is positive.\n"
     "2 | | CONCLUSION[0, 1]: x^2 > 4 // So x^2 > 2x > 4.\n"
     "3 | CONCLUSION[0, 2]: x > 2 -> x^2 > 4 // Hence the implication.\n"),
)

_INSTRUCTIONS = (
    "Translate the problem and its solution into a context file. Use one statement "
    "per reasoning step, keep every number exact, and copy the sentence each "
    "statement comes from after '//'. Reply with the context file only."
)

TEMPLATES = ("default",)


def _examples() -> str:
    parts = []
    for i, (problem, solution, context) in enumerate(FEW_SHOT, 1):
        parts.append(f"EXAMPLE {i}\nProblem: {problem}\nSolution: {solution}\n"
                     f"Context:\n{context}")
    return "\n".join(parts)


def build_formalization_prompt(problem: str, solution: str, template: str = "default") -> str:
    """Grammar, statement kinds, worked examples, then the target pair."""
    if template not in TEMPLATES:
        raise UnknownTemplate(f"unknown prompt template {template!r}")
    if not solution.strip():
        raise PromptError("a solution text is required")
    return (f"{_INSTRUCTIONS}\n\n{GRAMMAR_BLOCK}\n{KIND_DEFINITIONS}\n{_examples()}\n"
            f"TASK\nProblem: {problem.strip()}\nSolution: {solution.strip()}\nContext:\n")


def build_repair_prompt(prompt: str, previous: str, diagnostics: list[str]) -> str:
    shown = "\n".join(f"- {d}" for d in diagnostics)
    return (f"{prompt}{previous.rstrip()}\n\nThe context above was rejected:\n{shown}\n"
            f"Reply with a corrected context file only.\nContext:\n")


def build_generation_prompt(problem: str) -> str:
    return (f"Solve the following problem step by step. State each step as a short "
            f"sentence with exact arithmetic.\nProblem: {problem.strip()}\nSolution:\n")


def build_regeneration_prompt(problem: str, solution: str, feedback: list[str]) -> str:
    """The original problem, the prior solution verbatim, then numbered feedback."""
    items = "\n".join(f"{i}. {text}" for i, text in enumerate(feedback, 1))
    return (f"Problem: {problem.strip()}\n\nPrevious solution:\n{solution.rstrip()}\n\n"
            f"A checker found these problems:\n{items}\n\n"
            f"Write a corrected solution step by step.\nSolution:\n")


__all__ = [
    "FEW_SHOT", "GRAMMAR_BLOCK", "KIND_DEFINITIONS", "TEMPLATES", "build_formalization_prompt",
    "build_generation_prompt", "build_regeneration_prompt", "build_repair_prompt",
]
