"""Radicals, spectra and structure theory for subalgebras of M_n(C)."""

from .errors import (ContourError, DimensionError, NumericalFailure, PreconditionError,
                     RadlieError, ResolventError)
from .numeric import DEFAULT_TOL, TolerancePolicy

__version__ = "0.1.0"

__all__ = ["ContourError", "DimensionError", "NumericalFailure", "PreconditionError",
           "RadlieError", "ResolventError", "DEFAULT_TOL", "TolerancePolicy", "__version__"]
