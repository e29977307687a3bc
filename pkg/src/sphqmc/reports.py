"""Delimited and JSON report writing with fixed schemas.

Schemas are frozen tuples of column names; CSV writers order columns by
schema and JSON mirrors carry a ``schema_version`` so downstream parsers
can detect drift.  Values render as plain decimal (floats via repr, which
round-trips), infinities as the string "inf".
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Mapping, Sequence

SCHEMA_VERSION = 1

SCHEMAS = {
    "wce": ("family", "kernel", "s", "n", "wce"),
    "fit": ("family", "s", "alpha", "beta", "residual"),
    "expectation": ("kernel", "s", "n", "predicted", "estimated", "stderr", "z"),
    "franke": ("family", "n", "error"),
    "sstar": ("family", "s_star", "conjectured"),
    "wce_report": ("n", "d", "s", "kernel", "wce", "energy", "a0", "method"),
}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def render_csv(kind: str, rows: Iterable[Mapping]) -> str:
    columns = SCHEMAS[kind]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_csv(path, kind: str, rows: Iterable[Mapping]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(kind, rows))


def _jsonable(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return None
    return value


def render_json(kind: str, rows: Iterable[Mapping], meta: Mapping | None = None) -> str:
    columns = SCHEMAS[kind]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "columns": list(columns),
        "rows": [{c: _jsonable(row.get(c)) for c in columns} for row in rows],
    }
    if meta:
        payload["meta"] = dict(meta)
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_json(path, kind: str, rows: Iterable[Mapping],
               meta: Mapping | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_json(kind, rows, meta=meta))


def render_text(kind: str, rows: Sequence[Mapping]) -> str:
    """Fixed-width table for terminals."""
    columns = SCHEMAS[kind]
    cells = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) if cells else len(c)
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for r in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"
