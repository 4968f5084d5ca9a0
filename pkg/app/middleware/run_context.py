"""
Run tracking for benchmark executions.
"""

import time
import uuid
from contextlib import contextmanager
from typing import Iterator, Optional

from app.logger_config import get_logger, set_run_id
from config.settings import get_settings

settings = get_settings()
logger = get_logger(__name__)


@contextmanager
def tracked_run(operation: str, run_id: Optional[str] = None) -> Iterator[str]:
    """
    Assign a run id to the current context and log start, end and failure
    with the elapsed time.

    Args:
        operation: Name of the tracked operation
        run_id: Explicit id; a short random id is generated when omitted

    Yields:
        str: The run id in effect
    """
    run_id = run_id or uuid.uuid4().hex[:12]
    set_run_id(run_id)

    start_time = time.perf_counter()
    logger.info(f"RUN START: {operation} app={settings.APP_ID} env={settings.APP_ENV}")
    try:
        yield run_id
    except Exception as e:
        duration = time.perf_counter() - start_time
        logger.error(f"RUN ERROR: {operation} error={type(e).__name__}: {e} duration={duration:.3f}s")
        raise
    duration = time.perf_counter() - start_time
    logger.info(f"RUN END: {operation} duration={duration:.3f}s")
