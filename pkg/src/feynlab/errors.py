"""Exception hierarchy.  The CLI maps these onto its exit codes."""


class FeynlabError(Exception):
    pass


class PreconditionError(FeynlabError, ValueError):
    """An input violates a documented precondition."""


class DomainError(PreconditionError):
    """A parameter lies outside the domain where the quantity is defined."""


class StructureError(PreconditionError):
    """A generator or graph lacks the structure an operation requires."""


class BudgetError(FeynlabError):
    """A brute-force computation would exceed its configured cell budget."""


class NumericError(FeynlabError, ArithmeticError):
    """Non-finite intermediate values or overflow."""


class TruncationError(FeynlabError):
    """Truncated-space mass exceeds the allowed threshold."""
