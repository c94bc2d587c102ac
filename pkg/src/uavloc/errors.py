"""Exception hierarchy shared by all modules."""


class UavLocError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(UavLocError, ValueError):
    pass


class ShapeError(UavLocError, ValueError):
    pass


class DomainError(UavLocError, ValueError):
    pass


class DegenerateGeometryError(UavLocError, ValueError):
    pass


class GeometryError(UavLocError, ValueError):
    pass


class NumericalError(UavLocError, ArithmeticError):
    pass


class SizeError(UavLocError, ValueError):
    pass


class NoPeakError(UavLocError, ValueError):
    pass


class StateError(UavLocError, RuntimeError):
    pass


class TrainingError(UavLocError, RuntimeError):
    """Training diverged; ``checkpoint`` holds the last finite parameters."""

    def __init__(self, message, checkpoint=None):
        super().__init__(message)
        self.checkpoint = checkpoint


class ProtocolViolation(UavLocError):
    pass


class ConfigurationError(UavLocError, ValueError):
    pass


class RevolutionError(UavLocError):
    """A component failed during a simulated revolution."""

    def __init__(self, revolution, cause):
        super().__init__(f"revolution {revolution}: {cause}")
        self.revolution = revolution
        self.cause = cause
