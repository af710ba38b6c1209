import sys

from loguru import logger

_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {extra[name]} | {message}"

logger.remove()
logger.configure(extra={"name": "vecfont"})
logger.add(sys.stderr, level="INFO", format=_FORMAT)


def configure_logging(level="INFO", log_file=None):
    """Reset sinks: stderr always, a rotating file only when asked for."""
    logger.remove()
    logger.add(sys.stderr, level=level, format=_FORMAT)
    if log_file:
        logger.add(log_file, rotation="1 MB", retention="7 days", level=level,
                   enqueue=True, format=_FORMAT)


def get_logger(name=None):
    return logger.bind(name=name or "vecfont")
