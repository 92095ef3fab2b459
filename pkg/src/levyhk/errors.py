"""Exception and warning types raised by the library."""


class LevyHKError(Exception):
    """Base class for library errors."""


class InvalidParameterError(LevyHKError, ValueError):
    """A profile or model parameter is outside its admissible range."""


class NonMonotoneTableError(InvalidParameterError):
    """A tabulated profile is not non-increasing."""


class DivergentLevyIntegralError(LevyHKError):
    """The integral of ``1 ∧ |x|^2`` against the jump measure is infinite."""


class QuadratureError(LevyHKError):
    """An adaptive quadrature failed to meet its tolerance."""


class NotInvertibleError(LevyHKError):
    """A monotone function could not be inverted at the requested level."""


class NotIntegrableError(LevyHKError):
    """The characteristic function does not decay fast enough to invert."""


class OscillationBudgetError(LevyHKError):
    """Fourier inversion would need more panels than allowed."""


class JumpBudgetError(LevyHKError):
    """The expected number of simulated jumps exceeds the budget."""


class WindowTooNarrowError(LevyHKError, ValueError):
    """A fitting window spans less than one decade."""


class CompoundPoissonWarning(UserWarning):
    """The jump measure is finite, so the process is compound Poisson."""


class FlatRegionWarning(UserWarning):
    """An inversion landed on a plateau of a non-decreasing function."""


class MaxOnBoundaryWarning(UserWarning):
    """A maximum search ended on the boundary of its scan window."""
