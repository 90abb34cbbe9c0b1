"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`CageError`,
so callers (and the command line front end) can map failures onto stable exit
codes without catching unrelated built-in errors.
"""


class CageError(Exception):
    """Base class for all package errors."""


class DimensionError(CageError, ValueError):
    """Matrix or vector shapes are incompatible."""


class DomainError(CageError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(CageError, ValueError):
    """Inputs are valid values but violate an operation's precondition."""


class PathError(CageError, ValueError):
    """A propagation path is empty or leaves the lattice."""


class ConvergenceError(CageError):
    """An iterative kernel did not converge.

    ``residual`` holds the last residual estimate when one is available.
    """

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class RangeError(CageError, OverflowError):
    """Entry magnitudes overflowed double precision."""


class ConsistencyError(CageError):
    """Two independent routes to the same answer disagree.

    ``verdicts`` maps the name of each route to what it concluded.
    """

    def __init__(self, msg, verdicts=None):
        super().__init__(msg)
        self.verdicts = dict(verdicts or {})


class InconclusiveLatticeError(CageError):
    """The lattice is too small: the excitation reached its edge."""


class DegenerateResponseError(CageError):
    """A perturbation produced no measurable spectral response."""


class ClassificationError(CageError):
    """A time series matched none of the growth criteria.

    ``residuals`` holds the fit diagnostics of every criterion tried.
    """

    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = dict(residuals or {})


class ConfigError(CageError, ValueError):
    """A configuration document is malformed or has unknown keys."""
