"""JSON/CSV plumbing: complex numbers travel as ``[re, im]`` pairs."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ParseError


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(pair: Any) -> complex:
    if (not isinstance(pair, (list, tuple)) or len(pair) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pair)):
        raise ParseError(f"expected a [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def vector_to_json(v: np.ndarray) -> list[list[float]]:
    return [complex_to_json(z) for z in np.asarray(v).ravel()]


def vector_from_json(data: Any) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ParseError("expected a non-empty list of [re, im] pairs")
    return np.array([complex_from_json(p) for p in data], dtype=complex)


def matrix_to_json(m: np.ndarray) -> list[list[list[float]]]:
    """Row-major nested list of ``[re, im]`` pairs."""
    m = np.asarray(m)
    return [[complex_to_json(z) for z in row] for row in m]


def matrix_from_json(data: Any) -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ParseError("expected a matrix as a list of rows")
    rows = [[complex_from_json(p) for p in row] for row in data]
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise ParseError("ragged or empty matrix rows")
    return np.array(rows, dtype=complex)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj: Any) -> None:
    """Write ``obj`` as JSON via temp file + rename."""
    _atomic_write_text(path, dumps(obj))


def read_json(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    _atomic_write_text(path, csv_text(header, rows))
