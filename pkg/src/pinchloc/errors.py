"""Exception types raised by the library."""


class PinchlocError(Exception):
    """Base class for all library errors."""


class ConfigError(PinchlocError):
    """Invalid configuration value or malformed scenario document."""


class DomainError(PinchlocError):
    """Argument outside the mathematical domain of an operation."""


class RankDeficiencyError(PinchlocError):
    """Lateration system has fewer than two distinct antenna coordinates."""


class SolveError(PinchlocError):
    """Normal matrix is numerically singular or ill-conditioned."""


class EvanescentModeError(PinchlocError):
    """Cut-off wavenumber at or above the material wavenumber; no propagating mode."""
