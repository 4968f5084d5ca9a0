"""
Mapping of exceptions to process exit codes for the command-line front end.
"""

import traceback

from pydantic import ValidationError

from app.logger_config import get_logger
from app.utils.errors import (
    DataError, DomainError, NumericalError, RainBenchError, StructuralError,
    TrainingDivergedError, UsageError
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(p) for p in error.get("loc", ())) or "config"
        parts.append(f"{location}: {error.get('msg')}")
    return "; ".join(parts)


def handle_exception(exc: BaseException) -> int:
    """
    Log an exception and return the exit code it maps to.

    Args:
        exc: The exception that ended the run

    Returns:
        int: 1 for usage errors, 2 for data errors, 3 for numerical failures
    """
    if isinstance(exc, ValidationError):
        logger.warning(f"Invalid configuration: {_format_validation(exc)}")
        return EXIT_USAGE

    if isinstance(exc, UsageError):
        logger.warning(f"Usage error: {exc}")
        return EXIT_USAGE

    if isinstance(exc, (DataError, DomainError)):
        logger.warning(f"Data error: {exc}")
        return EXIT_DATA

    if isinstance(exc, TrainingDivergedError):
        logger.error(f"Numerical failure in {exc.model}: {exc}")
        return EXIT_NUMERICAL

    if isinstance(exc, (NumericalError, StructuralError)):
        logger.error(f"Numerical failure: {exc}")
        return EXIT_NUMERICAL

    if isinstance(exc, RainBenchError):
        logger.error(f"Benchmark error: {exc}")
        return EXIT_NUMERICAL

    logger.error(
        f"Unexpected error: {type(exc).__name__}: {exc}",
        extra={"traceback": traceback.format_exc()}
    )
    logger.debug(traceback.format_exc())
    return EXIT_NUMERICAL
