"""Exception types raised by the model and the oracles."""


class ModelError(ValueError):
    """Base class for invalid or infeasible model evaluations."""


class NoRootInBracket(ModelError):
    pass


class DegenerateFootprint(ModelError):
    pass


class PointNotOnEllipse(ModelError):
    pass


class ZeroIlluminated(ModelError):
    """No RIS element lies inside the footprint.

    The offending :class:`~uavris.geometry.IlluminationResult` is kept on
    ``result`` so callers can still report the case tag and spillover.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class InsufficientEvents(RuntimeError):
    pass


class InsufficientCrossings(RuntimeError):
    pass


class EmptyRegion(RuntimeError):
    pass


class ConfigError(ValueError):
    pass
