"""Exception types shared across the package."""


class RicciFlowError(Exception):
    """Base class for all package-specific errors."""


class DomainError(RicciFlowError, ValueError):
    """An input lies outside the domain where a closed form is defined."""


class SingularMatrixError(RicciFlowError):
    """The 3x3 curvature system is numerically singular (condition > 1e12)."""


class StepSizeUnderflow(RicciFlowError):
    """The adaptive integrator could not continue (step size collapsed)."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NonPositiveState(RicciFlowError):
    """A metric coefficient is not strictly positive."""


class NoExitWithinHorizon(RicciFlowError):
    """The flow never crossed the positivity-cone boundary before max_time."""
