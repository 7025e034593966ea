import sys

from loguru import logger


def configure_logging(level: str = "WARNING", json: bool = False) -> None:
    """Route loguru records to stderr.

    Standard output carries CSV/JSON data only, so every sink goes to stderr.

    Args:
        level: Minimum level name (DEBUG, INFO, WARNING, ERROR)
        json: Emit serialized JSON records instead of text lines
    """
    logger.remove()
    logger.enable("qharness")
    if json:
        logger.add(sys.stderr, level=level.upper(), serialize=True)
    else:
        logger.add(
            sys.stderr,
            level=level.upper(),
            format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {name}:{function} - {message}",
        )
    logger.debug(f"Logging configured at {level.upper()} (json={json})")
