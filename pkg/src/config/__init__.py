"""
Run configuration and environment settings.
"""

from .settings import (
    RESOLVED_CONFIG_NAME,
    RunConfig,
    TrackerSettings,
    get_settings,
    load_run_config,
    parse_run_config,
)

__all__ = [
    "RESOLVED_CONFIG_NAME",
    "RunConfig",
    "TrackerSettings",
    "get_settings",
    "load_run_config",
    "parse_run_config",
]
