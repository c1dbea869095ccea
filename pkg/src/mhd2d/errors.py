"""Exception types raised by the library.

Every guarded precondition has a dedicated class so callers (and the CLI,
which maps them to exit codes) can distinguish configuration mistakes from
numerical blow-ups.
"""


class MHD2DError(Exception):
    """Base class for all library errors."""


class ConfigError(MHD2DError):
    """A run configuration file is missing, malformed, or inconsistent."""


class GridMismatch(MHD2DError):
    """Operands live on different grids."""


class NonFiniteSymbol(MHD2DError):
    """A Fourier symbol evaluated to NaN/Inf at a nonzero frequency."""


class BadCutoffs(MHD2DError):
    """Projector cutoffs are non-positive or out of order."""


class NegativeTime(MHD2DError):
    """A propagator time t < 0 was requested."""


class RegionMismatch(MHD2DError):
    """A frequency was passed to an envelope for a region it is not in."""


class BadRegion(MHD2DError):
    """An operation was asked for a region it does not support."""


class EmptySweep(MHD2DError):
    """A verification sweep contained no sample points."""


class StepTooLarge(MHD2DError):
    """Time step is non-positive or exceeds the stability bound."""


class NonFiniteState(MHD2DError):
    """A state developed NaN/Inf entries during time stepping."""


class TimeNotSampled(MHD2DError):
    """The requested time is not one of the trajectory's sample times."""


class TooFewSamples(MHD2DError):
    """Not enough samples to form the requested estimate."""


class WindowTooSmall(MHD2DError):
    """A fit window contains too few points."""


class NonPositiveValue(MHD2DError):
    """A quantity that must be positive (for log-fitting) is not."""


class ForcingInconsistency(UserWarning):
    """Nonlinear forcing failed an internal algebraic cross-check."""
