"""Exception types shared across the package."""


class SpinBlochError(Exception):
    """Base class for all package-specific errors."""


class QuadratureNotConverged(SpinBlochError):
    """Successive quadrature grid refinements disagree beyond tolerance."""


class InvalidBath(SpinBlochError):
    """Bath parameters place a pole on the real axis or are otherwise unusable."""


class CapacityExceeded(SpinBlochError):
    """Requested hierarchy exceeds the configured ADO budget."""


class DimensionMismatch(SpinBlochError):
    """Hierarchy and correlation expansion were built for different mode counts."""


class Diverged(SpinBlochError):
    """An auxiliary density operator norm crossed the blow-up threshold."""


class SingularProbeSet(SpinBlochError):
    """Probe initial states do not span the space of Hermitian matrices."""


class ConfigError(SpinBlochError):
    """Configuration file could not be parsed or validated."""
