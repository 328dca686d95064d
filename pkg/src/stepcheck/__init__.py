"""Step-level verification of formalized mathematical solutions."""

__version__ = "0.1.0"

from .context import Context, Statement, StatementKind, parse_context, validate_context
from .critic import Overall, Report, make_feedback, select_solution, verify_context
from .graph import build_graph, extract_judgments
from .verdict import Status, Verdict

__all__ = [
    "Context", "Overall", "Report", "Statement", "StatementKind", "Status", "Verdict",
    "__version__", "build_graph", "extract_judgments", "make_feedback", "parse_context",
    "select_solution", "validate_context", "verify_context",
]
