"""CSV/JSON serialization with lossless reals.

Reals are written with 17 significant digits, which round-trips every
double; ``hex_floats=True`` writes ``float.hex`` instead.  Readers accept
both spellings.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math

import numpy as np

from .driver import DriverSet
from .errors import DomainError


def format_real(v, hex_floats: bool = False) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if hex_floats:
        return v.hex()
    return f"{v:.17g}"


def parse_real(text: str) -> float:
    text = text.strip()
    try:
        if "0x" in text.lower():
            return float.fromhex(text)
        return float(text)
    except ValueError as exc:
        raise DomainError(f"cannot parse real {text!r}") from exc


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def write_csv(rows, header, hex_floats: bool = False) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else v if isinstance(v, str) else format_real(v, hex_floats) for v in row])
    return buf.getvalue()


def driver_to_csv(drivers: DriverSet, hex_floats: bool = False) -> str:
    rows = ((j, x1, x2) for j, (x1, x2) in enumerate(drivers.points, start=1))
    return write_csv(rows, ["j", "x1", "x2"], hex_floats)


def read_points_csv(text: str) -> np.ndarray:
    """Read ``j,x1,x2`` (or bare ``x1,x2``) rows into an ``(M, 2)`` array."""
    reader = csv.reader(_io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if rows and not _is_numeric(rows[0][-1]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        try:
            i1, i2 = header.index("x1"), header.index("x2")
        except ValueError as exc:
            raise DomainError("point CSV header must name columns x1 and x2") from exc
    else:
        i1, i2 = (1, 2) if rows and len(rows[0]) >= 3 else (0, 1)
    try:
        return np.array([[parse_real(r[i1]), parse_real(r[i2])] for r in rows], dtype=float).reshape(-1, 2)
    except IndexError as exc:
        raise DomainError("point CSV rows are too short") from exc


def read_samples_csv(text: str) -> np.ndarray:
    """Read a one-column sample CSV (header ``y`` optional)."""
    reader = csv.reader(_io.StringIO(text))
    rows = [r for r in reader if r and r[0].strip()]
    if rows and not _is_numeric(rows[0][0]):
        rows = rows[1:]
    return np.array([parse_real(r[-1]) for r in rows], dtype=float)


def _is_numeric(text: str) -> bool:
    try:
        parse_real(text)
        return True
    except DomainError:
        return False
