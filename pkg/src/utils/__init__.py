"""Shared helpers: atomic file writes and logging setup."""

from .io import atomic_path, write_bytes_atomic, write_text_atomic
from .logging_setup import setup_logging

__all__ = ["atomic_path", "write_bytes_atomic", "write_text_atomic", "setup_logging"]
