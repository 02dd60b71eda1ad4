"""Exception and warning types raised across wva_lab."""


class WvaLabError(ValueError):
    """Base class for numeric-domain errors raised by the library."""


class OrthogonalSelection(WvaLabError):
    """Pre- and post-selected states are (numerically) orthogonal."""


class UnreachableWeakValue(WvaLabError):
    """No normalizable post-selection realizes the requested weak value."""


class DegenerateOutput(WvaLabError):
    """Both output amplitudes underflowed; the state cannot be normalized."""


class MissingParameter(WvaLabError):
    """A scheme-specific parameter was not supplied."""


class UnphysicalOutput(WvaLabError):
    """A channel produced a Bloch vector outside the unit ball."""


class ApproximationDomain(WvaLabError):
    """The requested point lies outside the validity domain of an approximation."""


class ZeroInformation(WvaLabError):
    """Fisher information is zero, so no finite bound exists."""


class NotCompensable(WvaLabError):
    """The phase lies outside what the modulator can compensate."""


class NearSingularPurity(RuntimeWarning):
    """Bloch vector length is within 1e-6 of the pure-state branch boundary."""
