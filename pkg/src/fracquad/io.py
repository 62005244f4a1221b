"""CSV and JSON output with 17 significant digits.

Seventeen digits round-trip any double exactly, so written files reproduce
the computed values bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

from fracquad.fde import SolutionGrid


def format_float(x: float) -> str:
    return "%.17g" % x


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render an RFC 4180 table with a header row and CRLF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_value(value: Any) -> str:
    if isinstance(value, dict):
        items = ", ".join(
            f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items()
        )
        return "{" + items + "}"
    if isinstance(value, np.ndarray):
        return _json_value(value.tolist())
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no representation for nan or infinity
        return format_float(value) if math.isfinite(value) else "null"
    return json.dumps(value, ensure_ascii=False)


def to_json(value: Any) -> str:
    """Serialize dicts, lists and numbers; keys keep their insertion order."""
    return _json_value(value) + "\n"


def grid_to_csv(grid: SolutionGrid) -> str:
    return to_csv(
        ["t", "y_predicted", "y_corrected", "residual"],
        zip(grid.times, grid.predicted, grid.corrected, grid.residuals),
    )


def curve_to_csv(t: np.ndarray, reference: np.ndarray, approx: np.ndarray) -> str:
    return to_csv(["t", "y_reference", "y_approx"], zip(t, reference, approx))
