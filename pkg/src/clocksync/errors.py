"""Exception hierarchy shared by the simulation modules."""


class ClockSyncError(Exception):
    pass


class ConfigError(ClockSyncError, ValueError):
    """Invalid physical or run configuration."""


class EngineError(ClockSyncError):
    """Failure while evaluating amplitudes or coincidence rates.

    ``index`` is set when the failure happened at a specific scan grid point.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NonPositiveFrequency(EngineError):
    pass


class QuadratureNotConverged(EngineError):
    pass


class EstimationError(ClockSyncError):
    pass


class NoDipFound(EstimationError):
    pass


class EdgeDip(EstimationError):
    pass


class NotConverged(EstimationError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TransientRegion(ClockSyncError):
    """Belt read-out requested before the initial transient has passed."""
