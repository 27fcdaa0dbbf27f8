"""Exception types shared by every zyglab module."""


class ZygLabError(Exception):
    """Base class for all library errors."""


class BadSpec(ZygLabError, ValueError):
    """A parameter or function spec is out of range."""


class PointOutsideDisc(ZygLabError, ValueError):
    """A point with modulus >= 1 was passed where the open disc is required."""


class EvaluationSingularity(ZygLabError, ArithmeticError):
    """A closed form produced a non-finite value."""


class NumericalSingularity(EvaluationSingularity):
    """A Moebius denominator vanished to working precision."""


class ConvergenceFailure(ZygLabError, ArithmeticError):
    """A refinement loop did not meet its tolerance."""


class DegenerateComposite(ZygLabError, ArithmeticError):
    """Renormalizing a Moebius matrix did not yield a disc automorphism."""


class DegenerateParameters(ZygLabError, ValueError):
    """Flow parameters do not generate disc automorphisms."""


class NotInSpace(ZygLabError, ValueError):
    """A function fails the membership test of the required space."""


class ConfigInvalid(ZygLabError, ValueError):
    """A scenario configuration could not be parsed or validated."""

    def __init__(self, message, position=None):
        if position:
            message = f"{position}: {message}"
        super().__init__(message)
        self.position = position


class GridTooCoarse(UserWarning):
    """The local refinement improved the grid maximum by more than 10%."""
