"""Exception and warning classes shared across the package."""

from __future__ import annotations


class QCError(Exception):
    """Base class for all errors raised by qcext."""


class DomainError(QCError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class SingularSeriesError(DomainError):
    """A series operation needs a nonzero leading term and did not get one."""


class NotInvertibleError(SingularSeriesError):
    """Series reversion was requested for a series with vanishing linear term."""


class TruncationError(QCError):
    """The requested order exceeds what the available data supports.

    ``max_feasible`` carries the largest order that could have been served.
    """

    def __init__(self, message: str, max_feasible: int | None = None):
        super().__init__(message)
        self.max_feasible = max_feasible


class NormalizationError(DomainError):
    """A vector or map fails a required normalization."""


class NonIntegrableError(DomainError):
    """A density has a pole of order > 1 inside the integration region."""


class MissingDataError(QCError):
    """Required samples were not supplied."""


class AccuracyWarning(UserWarning):
    """Quadrature resolution may be insufficient for the requested result."""


class NodeShiftWarning(UserWarning):
    """A singular point fell on a quadrature node and the grid was rotated."""
