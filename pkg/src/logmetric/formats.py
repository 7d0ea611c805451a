"""File formats: point clouds, distance matrices, paths, and result
tables.

Conventions: point clouds are CSV with a header row naming coordinates;
distance matrices are headerless numeric CSV; paths are CSV rows t,x,y
with an optional literal header. Result tables write CSV with a
mandatory header and JSON as an array of row objects mirroring the CSV
field for field. Floats are emitted via repr, which round-trips exactly;
infinities appear as inf (CSV) and Infinity (JSON).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class InputError(Exception):
    """Malformed or unreadable user input."""


def fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def write_table_csv(path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt_value(row[c]) for c in columns])


def write_table_json(path, rows: list[dict], columns: list[str]) -> None:
    data = [{c: _jsonable(row[c]) for c in columns} for row in rows]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def write_table(path, rows: list[dict], columns: list[str], fmt: str) -> None:
    if fmt == "json":
        write_table_json(path, rows, columns)
    else:
        write_table_csv(path, rows, columns)


def write_matrix(path, matrix: np.ndarray, fmt: str) -> None:
    """Distance matrix output: headerless CSV rows, or a JSON array of
    arrays."""
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump([[float(x) for x in row] for row in matrix], fh)
            fh.write("\n")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([repr(float(x)) for x in row])


def _read_rows(path) -> list[list[str]]:
    p = Path(path)
    if not p.exists():
        raise InputError(f"input file not found: {p}")
    with open(p, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    if not rows:
        raise InputError(f"empty input file: {p}")
    return rows


def _is_numeric_row(row: list[str]) -> bool:
    try:
        for cell in row:
            float(cell)
    except ValueError:
        return False
    return True


def load_points_csv(path) -> np.ndarray:
    """Point cloud: one point per row, optional header of coordinate
    names; every data row must have the same width."""
    rows = _read_rows(path)
    if not _is_numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise InputError(f"no data rows in {path}")
    width = len(rows[0])
    data = []
    for k, row in enumerate(rows):
        if len(row) != width:
            raise InputError(f"row {k + 1} of {path} has {len(row)} fields, expected {width}")
        try:
            data.append([float(cell) for cell in row])
        except ValueError as exc:
            raise InputError(f"non-numeric value in row {k + 1} of {path}: {exc}") from None
    return np.asarray(data, dtype=np.float64)


def load_matrix_csv(path) -> np.ndarray:
    """Square distance matrix: headerless numeric CSV."""
    rows = _read_rows(path)
    n = len(rows)
    out = np.empty((n, n), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InputError(f"matrix row {i + 1} of {path} has {len(row)} fields, expected {n}")
        try:
            out[i] = [float(cell) for cell in row]
        except ValueError as exc:
            raise InputError(f"non-numeric value in matrix row {i + 1} of {path}: {exc}") from None
    return out


def load_path_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Path rows t,x,y with an optional literal t,x,y header; returns
    (params, points)."""
    rows = _read_rows(path)
    if [cell.strip().lower() for cell in rows[0]] == ["t", "x", "y"]:
        rows = rows[1:]
    if not rows:
        raise InputError(f"no data rows in {path}")
    params, pts = [], []
    for k, row in enumerate(rows):
        if len(row) != 3:
            raise InputError(f"path row {k + 1} of {path} must be t,x,y")
        try:
            t, x, y = (float(cell) for cell in row)
        except ValueError as exc:
            raise InputError(f"non-numeric value in path row {k + 1} of {path}: {exc}") from None
        params.append(t)
        pts.append((x, y))
    return np.asarray(params), np.asarray(pts, dtype=np.float64)


def parse_index_list(text: str) -> list[int]:
    """Region syntax: comma-separated indices, e.g. "0,3,17"."""
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise InputError(f"expected comma-separated integer indices, got {text!r}") from None


def parse_center_radius(text: str) -> tuple[int, float]:
    """Ball syntax: "center,radius" with an integer center index."""
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"expected center,radius, got {text!r}")
    try:
        return int(parts[0]), float(parts[1])
    except ValueError:
        raise InputError(f"expected center,radius, got {text!r}") from None
