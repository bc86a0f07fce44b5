"""
Logging setup for the delayed_oco command line.

The level comes from the ``POOL_LOG`` environment variable (a level name
like ``DEBUG`` or a number) and defaults to ``WARNING``.
"""
import logging
import os

PACKAGE_LOGGER = 'delayed_oco'


def _coerce_level(value):
    """
    Example:
        >>> from delayed_oco.util.util_logging import _coerce_level
        >>> _coerce_level('debug')
        10
        >>> _coerce_level('25')
        25
        >>> _coerce_level(None)
        30
    """
    if value is None or str(value).strip() == '':
        return logging.WARNING
    text = str(value).strip()
    if text.isdigit():
        return int(text)
    level = logging.getLevelName(text.upper())
    if not isinstance(level, int):
        raise ValueError(f'POOL_LOG={value!r} is not a logging level')
    return level


def setup_logging(level=None, force=False):
    """
    Attach a rich handler to the package logger.

    Args:
        level (str | int | None): overrides ``POOL_LOG`` when given
        force (bool): replace a previously installed handler

    Returns:
        logging.Logger

    Example:
        >>> from delayed_oco.util.util_logging import setup_logging
        >>> logger = setup_logging('INFO', force=True)
        >>> logger.level
        20
    """
    from rich.logging import RichHandler
    if level is None:
        level = os.environ.get('POOL_LOG', None)
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(_coerce_level(level))
    ours = [h for h in logger.handlers if getattr(h, '_delayed_oco', False)]
    if ours and not force:
        return logger
    for handler in ours:
        logger.removeHandler(handler)
    handler = RichHandler(show_path=False, rich_tracebacks=False)
    handler._delayed_oco = True
    handler.setFormatter(logging.Formatter('%(message)s'))
    logger.addHandler(handler)
    logger.propagate = False
    return logger
