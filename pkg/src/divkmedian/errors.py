"""Exception hierarchy.

The CLI maps these onto exit codes: usage/schema problems exit 2,
infeasible or inconclusive outcomes exit 3, oracle refusals exit 4.
"""


class DivKMedianError(Exception):
    """Base class for all package errors."""


class UsageError(DivKMedianError, ValueError):
    """A precondition on the arguments does not hold."""


class SchemaError(UsageError):
    """Input file is missing fields or columns."""


class InfeasibleError(DivKMedianError):
    """No feasible center set exists."""


class InconclusiveError(DivKMedianError):
    """Search budget exhausted before feasibility was decided."""


class OracleRefusal(DivKMedianError):
    """Exhaustive enumeration would exceed its cap."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class StaleCacheError(UsageError):
    """A cost cache was used for a center set it was not built for."""


class UndefinedMetricError(DivKMedianError, ZeroDivisionError):
    """A metric's denominator is zero."""
