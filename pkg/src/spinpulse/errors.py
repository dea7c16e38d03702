"""Exception types raised by the simulator."""


class SpinPulseError(Exception):
    """Base class for all simulator errors."""


class DimensionOverflow(SpinPulseError):
    """Chain length exceeds the configured dense-matrix cap."""


class DiagonalizationError(SpinPulseError):
    """Eigensolver failed or produced residuals above tolerance."""


class LabelAmbiguous(SpinPulseError):
    """Eigenstate-to-product-state labeling is ambiguous.

    Raised when the maximal squared overlap of an eigenstate with any
    product state is <= 0.5, or when two candidate product states tie
    within 1e-9.  Signals that the strong-mixing regime has been reached.
    """


class NotResonant(SpinPulseError):
    """Pulse frequency does not match the addressed transition."""


class UnknownTransition(SpinPulseError):
    """Requested transition has zero coupling or violates selection rules."""


class DegenerateTransition(SpinPulseError):
    """Another allowed transition lies within the pulse linewidth."""


class ToleranceNotMet(SpinPulseError):
    """Adaptive integrator could not satisfy the requested error bound."""


class StepTooLarge(SpinPulseError):
    """Oracle propagator step violates the norm(H)*step bound."""


class NoSolution(SpinPulseError):
    """The 2*pi*k amplitude condition has no real solution for this k."""


class DecompositionMismatch(SpinPulseError):
    """Pulse realization of a gate stage deviates from its ideal unitary."""


class ConfigError(SpinPulseError):
    """Invalid experiment configuration."""
