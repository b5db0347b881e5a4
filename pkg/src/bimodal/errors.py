"""Exception hierarchy. Everything raised on purpose derives from BimodalError."""


class BimodalError(Exception):
    pass


class DimensionError(BimodalError, ValueError):
    """Operator or state does not live on the expected space."""


class NotHermitianError(BimodalError, ValueError):
    pass


class InvalidStateError(BimodalError, ValueError):
    """A matrix fails the density-matrix invariants."""


class DegenerateSteadyStateError(BimodalError):
    """The Liouvillian has more than one stationary state."""


class VacuumStateError(BimodalError, ValueError):
    """Nothing is left after conditioning on at least one photon."""


class StepSizeError(BimodalError):
    """Time integration could not keep the trace within tolerance."""


class FitError(BimodalError, ValueError):
    pass


class ConfigError(BimodalError, ValueError):
    pass


class VacuumStateWarning(UserWarning):
    """The photonic steady state is exactly the vacuum; entanglement is reported as 0."""
