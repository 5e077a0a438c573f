"""JSON and CSV output with 17 significant digits for every float."""
from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path

import numpy as np


def fmt_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    text = format(v, ".17g")
    # keep a float marker so the value reads back as a float
    return text if any(c in text for c in ".en") else text + ".0"


def to_plain(obj):
    """Convert numpy containers and scalars, enums and tuples to JSON-ready values."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_plain(v) for v in items]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj, indent: int = 2) -> str:
    """json.dumps with floats written as ``%.17g``."""
    return _encode(to_plain(obj), indent, 0)


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}"
                          for k, v in obj.items())
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        body = ",\n".join(pad + _encode(v, indent, level + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    return json.dumps(obj)


def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def trace_rows(trace, gap=None):
    """Rows (n, x[0..d), y[0..d), gap) of a coupled trace.

    ``gap(x, y)`` defaults to the max-norm of y - x.
    """
    if gap is None:
        def gap(x, y):
            return float(np.max(np.abs(np.atleast_1d(y) - np.atleast_1d(x))))
    for n, x, y in trace.steps:
        xa, ya = np.atleast_1d(x), np.atleast_1d(y)
        yield [n, *xa.tolist(), *ya.tolist(), gap(x, y)]


def trace_header(dim: int) -> list[str]:
    return ["n", *(f"x[{i}]" for i in range(dim)), *(f"y[{i}]" for i in range(dim)), "gap"]


def write_trace_csv(trace, path, gap=None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dim = np.atleast_1d(trace.xs[0]).size
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(trace_header(dim))
        for row in trace_rows(trace, gap):
            w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
    return path
