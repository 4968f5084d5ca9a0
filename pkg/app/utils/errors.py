"""
Exception hierarchy for the rainfall forecasting benchmark.
"""

from pathlib import Path
from typing import Optional, Union


class RainBenchError(Exception):
    """Base class for all errors raised by this package."""
    pass


class DomainError(RainBenchError, ValueError):
    """A value lies outside the domain an operation accepts."""
    pass


class StructuralError(RainBenchError, ValueError):
    """Shapes, dimensions or indices do not fit together."""
    pass


class UsageError(RainBenchError):
    """Invalid command-line arguments or configuration values."""
    pass


class DataError(RainBenchError):
    """An input series could not be read."""

    def __init__(
        self,
        message: str,
        path: Optional[Union[str, Path]] = None,
        line: Optional[int] = None
    ):
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path is not None:
            location = self.path if line is None else f"{self.path}:{line}"
        elif line is not None:
            location = f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)


class NumericalError(RainBenchError):
    """A numerical procedure failed to produce finite results."""
    pass


class TrainingDivergedError(NumericalError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, model: str = "network", loss: float = float("nan")):
        self.epoch = epoch
        self.model = model
        self.loss = loss
        super().__init__(f"{model} training diverged at epoch {epoch} (loss={loss})")
