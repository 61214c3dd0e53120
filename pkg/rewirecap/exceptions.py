# rewirecap/exceptions.py

from typing import Any, Optional


class RewireCapError(Exception):
    """Base class for every error raised by rewirecap."""


class ConfigurationError(RewireCapError, ValueError):
    pass


class DataError(RewireCapError):
    pass


class DisconnectedGraphError(RewireCapError):
    def __init__(self, operation: str):
        super().__init__(f"{operation} requires a connected graph")
        self.operation = operation


class NumericError(RewireCapError, ArithmeticError):
    pass


class ConvergenceError(NumericError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"Power iteration did not converge after {iterations} iterations "
            f"(last residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations


class UndefinedCorrelationError(NumericError):
    pass


class DegenerateCoreError(NumericError):
    """
    Raised when every node has the same closeness. The single-core fallback
    partition is attached so callers can carry on with it.
    """

    def __init__(self, message: str, partition: Optional[Any] = None):
        super().__init__(message)
        self.partition = partition


class ZeroBetweennessError(NumericError):
    pass
