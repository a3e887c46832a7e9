"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidPairError(ValueError):
    """Gamma1 + Gamma2 vanishes where the reduced model needs it positive."""


class NotApplicableError(ValueError):
    """The operation does not apply to this switching pair or parameter set."""


class ConfigError(ValueError):
    """A run configuration failed validation."""


class InstabilityError(RuntimeError):
    """The time integrator produced non-finite or runaway values."""


class NoFrontError(RuntimeError):
    """No threshold crossing was found in a snapshot."""


class ContaminatedMeasurementError(RuntimeError):
    """The front has come too close to the right boundary to measure its speed."""
