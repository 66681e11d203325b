"""Deterministic JSON/CSV serialization with atomic file output."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import tempfile
from typing import Any, Iterable, Sequence

import numpy as np


def clean(obj: Any) -> Any:
    """Convert numpy scalars/arrays to plain Python; non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def json_text(report: dict) -> str:
    return json.dumps(clean(report), indent=2, allow_nan=False) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str | os.PathLike | None, text: str) -> None:
    """Write UTF-8 ``text`` to ``path`` via a temp file and rename; stdout if None."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".motskit-", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
