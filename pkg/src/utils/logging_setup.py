"""
Colorized logging setup shared by the CLI and the scripts.
"""

import logging
from typing import Union

import colorlog

LOG_FORMAT = "%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_HANDLER_NAME = "tracknet-console"


def setup_logging(level: Union[int, str] = logging.INFO) -> logging.Logger:
    """
    Install a single colorized stream handler on the root logger.

    Calling this twice replaces the handler instead of stacking a second one.

    Args:
        level: Logging level name or number

    Returns:
        The root logger
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            raise ValueError(f"Unknown log level: {level}")

    root = logging.getLogger()
    for handler in list(root.handlers):
        if handler.get_name() == _HANDLER_NAME:
            root.removeHandler(handler)

    handler = colorlog.StreamHandler()
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(
        colorlog.ColoredFormatter(
            LOG_FORMAT,
            log_colors={
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "bold_red",
            },
        )
    )
    root.addHandler(handler)
    root.setLevel(level)
    return root
