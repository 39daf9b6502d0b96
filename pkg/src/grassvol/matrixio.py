"""Matrix file formats used by the command-line tools.

Two interchangeable representations:

* CSV: one line per matrix row, comma-separated decimals.
* JSON: an object ``{"rows": r, "cols": c, "entries": [...]}`` with the
  entries flattened row-major.

Numbers are written with 17 significant digits so values round-trip exactly
through float64.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError
from .geometry import as_matrix


def format_float(x: float) -> str:
    """17-significant-digit decimal, the lossless float64 form used in files."""
    return format(float(x), ".17g")


def write_matrix_csv(path, m) -> None:
    m = as_matrix(m)
    lines = [",".join(format_float(v) for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    width = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = [float(v) for v in line.split(",")]
        except ValueError as exc:
            raise MatrixFormatError(f"{path}:{lineno}: {exc}") from exc
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixFormatError(
                f"{path}:{lineno}: expected {width} values, got {len(row)}"
            )
        rows.append(row)
    if not rows:
        raise MatrixFormatError(f"{path}: no matrix rows found")
    try:
        return as_matrix(np.array(rows))
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc


def write_matrix_json(path, m) -> None:
    m = as_matrix(m)
    obj = {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "entries": [float(v) for v in m.ravel(order="C")],
    }
    Path(path).write_text(json.dumps(obj) + "\n")


def read_matrix_json(path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = [float(v) for v in obj["entries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"{path}: malformed matrix object: {exc}") from exc
    if len(entries) != rows * cols:
        raise MatrixFormatError(
            f"{path}: entries length {len(entries)} != rows*cols {rows * cols}"
        )
    try:
        return as_matrix(np.array(entries).reshape(rows, cols))
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc


def read_matrix(path) -> np.ndarray:
    """Load a matrix, dispatching on the file suffix (.json vs CSV)."""
    if Path(path).suffix.lower() == ".json":
        return read_matrix_json(path)
    return read_matrix_csv(path)


def atomic_write_text(path, text: str) -> None:
    """Write via a same-directory temp file and rename, so readers never see
    a truncated file."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)
