"""
Atomic File Output
==================

Every artifact the pipeline writes (graphs, checkpoints, reports) goes through
these helpers: the payload lands in a temporary file next to the destination
and is moved into place with ``os.replace``.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

PathLike = Union[str, Path]


def atomic_write_bytes(path: PathLike, payload: bytes) -> Path:
    """Write bytes to ``path`` atomically and return the final path."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


def atomic_write_text(path: PathLike, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_json(path: PathLike, document: Any) -> Path:
    """Serialize ``document`` with sorted keys and a trailing newline."""
    return atomic_write_text(path, json.dumps(document, indent=2, sort_keys=True) + "\n")


__all__ = ["atomic_write_bytes", "atomic_write_text", "atomic_write_json"]
