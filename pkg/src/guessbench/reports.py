"""Report serialization: versioned JSON documents and flat CSV tables.

All writes go through a temp file in the destination directory followed by
``os.replace`` so readers never observe a partial file.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

SCHEMA_VERSION = 1


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _clean(obj):
    # NaN/inf are not valid JSON; undefined values are reported as null.
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return _clean(obj.item())
    return obj


def dumps(doc: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION}
    body.update(doc)
    return json.dumps(_clean(body), indent=2, ensure_ascii=False) + "\n"


def write_json(path, doc: dict) -> Path:
    return atomic_write_text(path, dumps(doc))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if not math.isfinite(v):
            return ""
        return f"{v:.6f}".rstrip("0").rstrip(".") if v != int(v) else f"{v:.1f}"
    return v


def table_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return atomic_write_text(path, table_csv(header, rows))


def matrix_rows(names: Sequence[str], cols: Sequence[str], cell) -> list[list]:
    """Rows for a labeled matrix; ``cell(row, col)`` may return None."""
    return [[r] + [cell(r, c) for c in cols] for r in names]
