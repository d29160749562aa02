"""Plot-ready tables and scalar records as CSV, JSON or plain text.

Numbers are written with 12 significant digits; infinities as ``inf``.
Output depends only on the values passed in, so repeated runs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

FORMATS = ("text", "csv", "json")


@dataclass
class Table:
    columns: Sequence[str]
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    csv_meta: bool = True  # write meta as leading "# key=value" lines


@dataclass
class Record:
    """Named scalars; ``primary`` is the one printed bare in text mode."""

    values: dict
    primary: Optional[str] = None


Result = Union[Table, Record]


def fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    if x is None:
        return ""
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return fmt_number(x)
        return float(format(x, ".12g"))
    if isinstance(x, dict):
        return {str(k): _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in x]
    return x


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    for k, v in (table.meta.items() if table.csv_meta else ()):
        buf.write(f"# {k}={fmt_number(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([fmt_number(v) for v in row])
    return buf.getvalue()


def to_json(result: Result) -> str:
    if isinstance(result, Record):
        obj: Any = _json_value(result.values)
    else:
        obj = {
            "meta": _json_value(result.meta),
            "columns": list(result.columns),
            "rows": [dict(zip(result.columns, _json_value(list(r)))) for r in result.rows],
        }
    return json.dumps(obj, indent=2) + "\n"


def to_text(result: Result) -> str:
    if isinstance(result, Table):
        return to_csv(result)
    if result.primary is not None:
        return fmt_number(result.values[result.primary]) + "\n"
    return "".join(f"{k} = {fmt_number(v)}\n" for k, v in result.values.items())


def render(result: Result, fmt: str) -> str:
    if fmt == "csv":
        if isinstance(result, Record):
            return to_csv(Table(list(result.values), [list(result.values.values())]))
        return to_csv(result)
    if fmt == "json":
        return to_json(result)
    if fmt == "text":
        return to_text(result)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def emit(result: Result, fmt: str, path: Optional[str] = None, stream=None) -> str:
    """Render ``result`` and write it to ``path`` (or ``stream``); returns the text.

    An unwritable path raises ``OSError``.
    """
    text = render(result, fmt)
    if path:
        Path(path).write_text(text, encoding="utf-8")
    elif stream is not None:
        stream.write(text)
    return text
