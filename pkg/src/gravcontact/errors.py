"""Exception types shared across the package."""


class GravContactError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(GravContactError):
    """Array slots that must share a dimension do not."""


class EvaluationDomainError(GravContactError):
    """A field evaluator produced a non-finite sample."""


class UnsupportedDegreeError(GravContactError):
    """A bracket or contraction was requested for degrees it does not define."""


class ChartDomainError(GravContactError):
    """Coordinates fall outside the validity domain of the chart."""


class ParameterError(GravContactError):
    """Catalog parameters violate their constraints."""


class TimelikeViolationError(GravContactError):
    """The lifted direction of a phase point is not timelike.

    Carries the offending squared norm so callers can report how far the
    point sits from the admissible region.
    """

    def __init__(self, message: str, norm2: float):
        super().__init__(message)
        self.norm2 = norm2


class ClosednessError(GravContactError):
    """An electromagnetic field failed its closedness requirement."""


class ConfigError(GravContactError):
    """A scenario configuration is malformed or inconsistent."""
