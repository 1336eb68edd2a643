"""Exceptions raised by rankbreak."""


class RankBreakError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgumentError(RankBreakError, ValueError):
    """An argument lies outside the domain of the operation."""


class ParseError(RankBreakError, ValueError):
    """An input file row could not be read as a finite real number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class EmbeddingError(RankBreakError, ArithmeticError):
    """The circulant embedding of an autocovariance has a negative eigenvalue."""


class DegenerateDataError(RankBreakError):
    """
    The data cannot support the requested statistic.

    Tests attach the procedure name and, once known, the estimated split
    point so that callers can still report where the sample was divided.
    """

    def __init__(self, message: str, procedure: str | None = None, k_hat: int | None = None):
        super().__init__(message)
        self.procedure = procedure
        self.k_hat = k_hat


class DegenerateSegmentError(DegenerateDataError):
    """A segment is too short for the statistic or the variance estimator."""

    def __init__(self, message: str, segment: int | None = None, **kwargs):
        super().__init__(message, **kwargs)
        self.segment = segment


class ZeroScaleError(DegenerateDataError):
    """A scale or long-run variance estimate is zero."""


class ZeroVarianceError(ZeroScaleError):
    """The sample variance of the data is zero."""
