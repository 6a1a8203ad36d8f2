"""CSV/JSON tables for rate/fidelity curves.

Every frontier table uses the same columns, with unused cells left empty.
Floats are written with ``repr``, the shortest string that round-trips.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

FRONTIER_COLUMNS = ("r", "B", "mu", "K_eff", "eta", "dark", "detector", "fidelity", "herald_prob", "status")
MULTIPLEX_COLUMNS = ("r", "fidelity", "nu", "n_sources", "switched_prob")
TEXT_COLUMNS = {"detector", "status"}
INT_COLUMNS = {"n_sources"}


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int)) and not isinstance(value, float):
        return str(int(value))
    return repr(float(value))


def parse_value(column: str, text: str):
    if column in TEXT_COLUMNS:
        return text
    if text == "":
        return None
    if column in INT_COLUMNS:
        return int(text)
    return float(text)


def render_csv(rows, columns=FRONTIER_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(rows, columns=FRONTIER_COLUMNS, meta=None) -> str:
    doc = {"columns": list(columns), "rows": [{c: row.get(c) for c in columns} for row in rows]}
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_table(rows, path, fmt: str = "csv", columns=FRONTIER_COLUMNS, meta=None) -> None:
    """Write ``rows`` (dicts keyed by column) to ``path``; ``"-"`` means stdout."""
    if fmt == "csv":
        text = render_csv(rows, columns)
    elif fmt == "json":
        text = render_json(rows, columns, meta)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


def read_table(path) -> list[dict]:
    """Read a CSV written by :func:`write_table` back into typed rows."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [{c: parse_value(c, v) for c, v in row.items()} for row in reader]
