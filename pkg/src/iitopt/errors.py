"""Exception types shared across the package."""


class ModelError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameters(ModelError, ValueError):
    """Model parameters violate a structural requirement (positivity, bistability)."""


class InvalidControl(ModelError, ValueError):
    """A control profile violates its box constraint or grid contract."""


class GridMismatch(ModelError, ValueError):
    """Two objects that must share a time grid do not."""


class InfeasibleRate(ModelError, ValueError):
    """Release rate too small: the threshold cannot be reached at any finite time."""


class InfeasibleHorizon(ModelError, ValueError):
    """Horizon shorter than the minimal replacement time at the given rate."""


class IntegrationUnstable(ModelError, RuntimeError):
    """The fixed-step integrator produced a strongly non-physical state."""
