"""Field/path file formats and atomic writes.

Field CSV: header ``vertex,value`` then one row per vertex.
Field JSON: metadata (kind, target, params, sign, residual, flags) + values.
Path CSV: header ``x,y`` then one row per sampled point.
Path JSON: points, locations, status, source, target, length.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import MeshFormatError
from .paths import TracedPath
from .solvers import ScalarField


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def field_to_csv(field: ScalarField) -> str:
    lines = ["vertex,value"]
    lines.extend(f"{i},{v:.17g}" for i, v in enumerate(field.values))
    return "\n".join(lines) + "\n"


def field_to_json(field: ScalarField) -> str:
    payload = {
        "kind": field.kind,
        "target": field.target,
        "params": field.params,
        "sign": field.sign,
        "residual": field.residual,
        "precision_flags": list(field.precision_flags),
        "values": [float(v) for v in field.values],
    }
    return json.dumps(payload, indent=2) + "\n"


def values_from_field_file(path: str | Path) -> np.ndarray:
    """Read per-vertex values back from a field CSV or JSON file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return np.asarray(json.loads(text)["values"], dtype=float)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("vertex"):
        raise MeshFormatError(f"{path}: expected 'vertex,value' header")
    pairs = [ln.split(",") for ln in lines[1:]]
    values = np.empty(len(pairs))
    for idx, val in pairs:
        values[int(idx)] = float(val)
    return values


def path_to_csv(path: TracedPath) -> str:
    lines = ["x,y"]
    lines.extend(f"{x:.17g},{y:.17g}" for x, y in path.points)
    return "\n".join(lines) + "\n"


def path_to_json(path: TracedPath) -> str:
    payload = {
        "source": path.source,
        "target": path.target,
        "status": path.status,
        "stuck_vertex": path.stuck_vertex,
        "length": path.length,
        "points": [[float(x), float(y)] for x, y in path.points],
        "locations": [list(loc) for loc in path.locations],
    }
    return json.dumps(payload, indent=2) + "\n"


def points_from_path_file(path: str | Path) -> np.ndarray:
    """Read polyline points back from a path CSV or JSON file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return np.asarray(json.loads(text)["points"], dtype=float)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("x"):
        raise MeshFormatError(f"{path}: expected 'x,y' header")
    return np.array([[float(a) for a in ln.split(",")] for ln in lines[1:]])
