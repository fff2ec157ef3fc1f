"""
Atomic file writes: write to a temp file in the target directory, then rename.
"""

import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Union

logger = logging.getLogger(__name__)


@contextmanager
def atomic_path(target: Union[str, Path]) -> Iterator[Path]:
    """
    Yield a temporary path next to `target`; rename it over `target` on success.

    The temp file is removed if the body raises.

    Args:
        target: Final file path

    Yields:
        Temporary path to write to
    """
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        prefix=f".{target.name}.", suffix=".tmp", dir=str(target.parent)
    )
    os.close(fd)
    tmp_path = Path(tmp_name)
    try:
        yield tmp_path
        os.replace(tmp_path, target)
        logger.debug(f"Wrote {target}")
    except BaseException:
        if tmp_path.exists():
            tmp_path.unlink()
        raise


def write_text_atomic(target: Union[str, Path], text: str) -> Path:
    """
    Write UTF-8 text with LF line endings atomically.

    Args:
        target: Destination path
        text: File contents

    Returns:
        The destination path
    """
    with atomic_path(target) as tmp:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return Path(target)


def write_bytes_atomic(target: Union[str, Path], data: bytes) -> Path:
    """
    Write raw bytes atomically.

    Args:
        target: Destination path
        data: File contents

    Returns:
        The destination path
    """
    with atomic_path(target) as tmp:
        tmp.write_bytes(data)
    return Path(target)
