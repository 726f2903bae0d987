"""Atomic, byte-deterministic artifact writers (CSV and JSON)."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence


def fmt(value) -> str:
    """Shortest round-trip decimal for floats; str() for everything else."""
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item"):  # numpy scalars
        return repr(value.item())
    return str(value)


def _write_atomic(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    _write_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def write_text(path, text: str) -> Path:
    path = Path(path)
    _write_atomic(path, text)
    return path
