"""Exception hierarchy shared by every package of the toolkit."""


class AncBoundError(Exception):
    """Base class for all toolkit errors."""
    pass


class ArgumentError(AncBoundError, ValueError):
    """Invalid argument: empty input, bad length, non-positive target."""
    pass


class ConfigurationError(AncBoundError):
    """Inconsistent configuration, e.g. mismatched sample rates."""
    pass


class InfeasibleRoomError(ConfigurationError):
    """Reverberation time cannot be realized by the room (absorption >= 1)."""
    pass


class DivergenceError(AncBoundError):
    """Adaptive filter blew up; carries the offending step size."""

    def __init__(self, step_size: float, message: str):
        super().__init__(message)
        self.step_size = step_size


class IngestionError(AncBoundError):
    """External waveform failed validation after standardization."""
    pass


class UndefinedRatioError(AncBoundError):
    """Support ratio has an empty denominator."""
    pass


class UndefinedMetricError(AncBoundError):
    """Metric undefined for the given signals (zero disturbance power)."""
    pass


class InternalError(AncBoundError):
    """A component broke its output contract."""
    pass
