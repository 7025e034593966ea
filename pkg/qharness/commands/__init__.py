# qharness command layer: one module per CLI subcommand, each returning a status dictionary

from typing import Any, Dict

import numpy as np
from loguru import logger
from pydantic import ValidationError

from ..errors import DomainError, InconsistencyError, NumericalError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def error_result(action: str, exc: Exception) -> Dict[str, Any]:
    """Log a failed command and build its error dictionary with the matching exit code."""
    if isinstance(exc, (ValidationError, DomainError)):
        code = EXIT_USAGE
    elif isinstance(exc, (NumericalError, InconsistencyError, np.linalg.LinAlgError, FloatingPointError)):
        code = EXIT_NUMERICAL
    else:
        raise exc
    logger.error(f"Error {action}: {str(exc)}")
    return {
        "status": "error",
        "message": str(exc),
        "exit_code": code,
    }


from . import kernel, marginal, sample, verify  # noqa: E402
