"""Exception hierarchy shared by every stepcheck subsystem."""

from __future__ import annotations


class StepcheckError(Exception):
    """Base class for all errors raised by stepcheck."""


# -- language -----------------------------------------------------------------


class ParseError(StepcheckError, ValueError):
    """Malformed SimpleMath or context text.

    Carries the 1-based ``line``/``column`` of the offending token and the
    set of token kinds the parser would have accepted there.
    """

    def __init__(self, message: str, line: int = 1, column: int = 1,
                 expected: frozenset[str] | set[str] = frozenset(), token: str = ""):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        self.token = token
        detail = f"{message} at line {line}, column {column}"
        if token:
            detail += f" (found {token!r})"
        if self.expected:
            detail += "; expected one of: " + ", ".join(sorted(self.expected))
        super().__init__(detail)
        self.message = message


class ArityError(ParseError):
    """Definition branches (or signature) disagree on the parameter count."""


class CaptureError(StepcheckError):
    """Substitution would capture a free variable of the replacement term."""


# -- context / graph -----------------------------------------------------------


class ContextError(StepcheckError):
    """A context violates a structural invariant."""

    def __init__(self, message: str, statement_id: int | None = None, rule: str = ""):
        super().__init__(message)
        self.statement_id = statement_id
        self.rule = rule


class PremiseReferenceError(ContextError):
    """A premise id is missing or refers forward."""


class NestingError(ContextError):
    """Assumption scopes are not well bracketed."""


class StructureError(ContextError):
    """Any other structural defect (kind/premise mismatch, bad discharge, ...)."""


# -- computer algebra ------------------------------------------------------------


class EvaluationError(StepcheckError):
    """Exact evaluation could not produce a value."""


class DivisionByZero(EvaluationError):
    def __init__(self, subterm: object, message: str = "division by zero"):
        super().__init__(f"{message}: {subterm}")
        self.subterm = subterm


class UnboundVariable(EvaluationError):
    def __init__(self, name: str):
        super().__init__(f"unbound symbol {name!r}")
        self.name = name


class NonIntegerExponent(EvaluationError):
    pass


class OutsideDomain(EvaluationError):
    """A defined function was applied outside its declared domain or guards."""


class UnsupportedTerm(StepcheckError):
    """The term lies outside the algebraic fragment the CAS kernel handles."""


class DegreeTooHigh(StepcheckError):
    pass


class NotUnivariate(StepcheckError):
    pass


class DegenerateEquation(StepcheckError):
    """The equation holds identically, so it has no finite root list."""


# -- SMT ----------------------------------------------------------------------------


class SortClash(StepcheckError):
    pass


class UnsupportedFeature(StepcheckError):
    pass


class SolverError(StepcheckError):
    def __init__(self, message: str, stderr: str = "", exit_code: int | None = None):
        super().__init__(message)
        self.stderr = stderr
        self.exit_code = exit_code


# -- formalizer ---------------------------------------------------------------------


class PromptError(StepcheckError):
    pass


class UnknownTemplate(PromptError):
    pass


class TransportError(StepcheckError):
    pass


class FormalizationFailed(StepcheckError):
    def __init__(self, diagnostics: list[str], attempts: int | None = None):
        attempts = len(diagnostics) if attempts is None else attempts
        super().__init__(f"formalization failed after {attempts} attempt(s)")
        self.diagnostics = list(diagnostics)
        self.attempts = attempts
