"""Exception hierarchy shared by every layer of the checker."""

from __future__ import annotations


class LazyMdpError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(LazyMdpError):
    """Malformed model: type errors, undeclared variables, bad probabilities."""


class ParseError(ModelError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class EvaluationError(LazyMdpError):
    """Runtime failure while evaluating an expression or assignment."""


class OutOfRangeError(EvaluationError):
    def __init__(self, variable: str, value, lo, hi, context: str = ""):
        msg = f"value {value} for variable {variable!r} outside range [{lo}..{hi}]"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
        self.variable = variable
        self.value = value


class DomainError(LazyMdpError):
    """Abstract-domain failure, e.g. an external entailment backend misbehaved."""


class ContractError(LazyMdpError):
    """An operation was called with its precondition violated."""


class BudgetExceeded(LazyMdpError):
    """A node, trace or iteration budget ran out.

    ``partial`` carries whatever was computed so far (a Pasg, a SolveResult, ...).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
