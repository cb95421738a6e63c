"""
Exception hierarchy for bandspectra.
"""
from typing import Optional


class SpectraError(Exception):
    """Base class for every error raised by the toolkit."""


class BudgetExceededError(SpectraError):
    """A requested enumeration or simulation is larger than its configured cap."""

    def __init__(self, kind: str, requested: int, cap: int):
        self.kind = kind
        self.requested = requested
        self.cap = cap
        super().__init__(f"{kind} budget exceeded: requested {requested}, cap {cap}")


class EnumerationCapError(BudgetExceededError):
    """Tree or composition enumeration beyond the configured cap."""


class NotATreeError(SpectraError, ValueError):
    """A closed walk whose edges do not form a tree crossed exactly twice per edge."""


class ParityError(SpectraError, ValueError):
    """A walk that does not alternate between the I-line and the K-line."""


class RegimeViolationError(SpectraError, ValueError):
    """Parameters outside the regime where a leading-order formula is stated."""


class DimensionMismatchError(SpectraError, ValueError):
    """Operand shapes that do not fit together."""


class NoEigenvalueDataError(SpectraError, ValueError):
    """A statistic needs eigenvalues but none of the samples carries them."""


class ConvergenceError(SpectraError, ArithmeticError):
    """The tridiagonal iteration did not converge within its iteration cap."""

    def __init__(self, index: int, iterations: int, replicate_index: Optional[int] = None):
        self.index = index
        self.iterations = iterations
        self.replicate_index = replicate_index
        where = f" in replicate {replicate_index}" if replicate_index is not None else ""
        super().__init__(f"eigenvalue {index} did not converge after {iterations} iterations{where}")

    def with_replicate(self, replicate_index: int) -> 'ConvergenceError':
        return ConvergenceError(self.index, self.iterations, replicate_index)
