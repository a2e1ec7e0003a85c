"""Exception hierarchy.

Every error belongs to one of three families, and each family maps to one
CLI exit status (see :mod:`slopelab.cli`).
"""


class SlopeLabError(Exception):
    """Base class for all package errors."""

    exit_status = 1


class ValidationError(SlopeLabError, ValueError):
    """Input violates a documented precondition."""

    exit_status = 3


class NumericalError(SlopeLabError, ArithmeticError):
    """A numerical procedure could not deliver a trustworthy result."""

    exit_status = 4


class VerificationFailed(SlopeLabError):
    exit_status = 5


# staircase geometry
class NonMonotoneU(ValidationError):
    pass


class HeightBelowOne(ValidationError):
    pass


class NonMonotoneHeights(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class DegenerateGeometry(ValidationError):
    pass


class GeometryNotJordan(ValidationError):
    pass


# evaluation domains
class OutsideDisk(ValidationError):
    pass


class OutsideDomain(ValidationError):
    pass


class OutsideQuadrant(ValidationError):
    pass


class TooCloseToBoundary(ValidationError):
    pass


class LeavesTrustedRegion(ValidationError):
    pass


class TooFewSamples(ValidationError):
    pass


# numerics
class ResolutionTooLow(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class CapExceeded(NumericalError):
    pass


class StageFailed(NumericalError):
    def __init__(self, n, cause):
        super().__init__(f"stage {n} failed: {cause}")
        self.n = n
        self.cause = cause
