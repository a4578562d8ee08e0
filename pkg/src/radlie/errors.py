"""Exception hierarchy shared by all modules."""


class RadlieError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(RadlieError, ValueError):
    """Shapes are wrong: non-square, mismatched, or too large."""


class PreconditionError(RadlieError, ValueError):
    """An operation was called outside its stated hypotheses."""


class NumericalFailure(RadlieError, ArithmeticError):
    """A numerical decision could not be made reliably."""


class ContourError(NumericalFailure):
    """No admissible integration contour for the requested evaluation."""


class ResolventError(NumericalFailure):
    """The requested point lies (numerically) in the spectrum."""
