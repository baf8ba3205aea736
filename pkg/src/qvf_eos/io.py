"""CSV and JSON table formats shared by the command line tools.

CSV: a header row naming the columns, one record per line, ``nan`` for a
missing value.  JSON: ``{"meta": {...}, "data": [{column: value}, ...]}``
with ``null`` for a missing value.  Floats are written with ``repr`` so that
they round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from . import __version__


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in value]
    return value


def render(columns, rows, fmt, meta):
    """Serialise ``rows`` (sequences aligned with ``columns``) as text."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        meta = dict(meta)
        meta.setdefault("version", __version__)
        doc = {
            "meta": _json_value(meta),
            "data": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows],
        }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")


def write(text, path=None, stream=None):
    if path is None:
        stream.write(text)
    else:
        Path(path).write_text(text)


def read_table(path):
    """Read a CSV or JSON table back into ``(columns, dict of arrays, meta)``."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        records = doc.get("data", [])
        columns = list(records[0]) if records else []
        data = {
            c: _column(["nan" if r.get(c) is None else r[c] for r in records])
            for c in columns
        }
        return columns, data, doc.get("meta", {})
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = [row for row in reader if row]
    data = {c: _column([row[i] for row in rows]) for i, c in enumerate(columns)}
    return columns, data, {}


def _column(cells):
    try:
        return np.array([float(v) for v in cells])
    except ValueError:
        return np.array(cells)


def read_trace(path, eps_r=None):
    """Load a ratio trace with columns ``omega`` and ``value`` (optional ``sigma``)."""
    from .inversion import MeasuredTrace

    columns, data, meta = read_table(path)
    if "omega" not in data or "value" not in data:
        raise ValueError(f"{path}: expected columns 'omega' and 'value', found {columns}")
    if eps_r is None:
        eps_r = float(meta.get("eps_r", meta.get("model", {}).get("eps_r", 1.0)))
    sigma = data.get("sigma")
    return MeasuredTrace(data["omega"], data["value"], sigma, eps_r)
