"""Result tables and their CSV/JSON encodings.

CSV files have a header row, ``\\n`` line endings and floats written with 17
significant digits, so parsing a file and emitting it again reproduces it
byte for byte. Cells hold floats, ints, bools, strings or ``None`` (empty).
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "ResultTable",
    "format_cell",
    "parse_cell",
    "write_tables",
    "tables_to_json",
    "tables_from_json",
]

_INT = re.compile(r"^[+-]?\d+$")


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # Adding 0.0 folds -0.0 into 0.0, which would otherwise parse as int 0.
        return format(value + 0.0, ".17g")
    if hasattr(value, "value") and isinstance(value.value, str):  # enums
        return value.value
    return str(value)


def parse_cell(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if _INT.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if hasattr(value, "value") and isinstance(value.value, str):
        return value.value
    return value


@dataclass(frozen=True)
class ResultTable:
    """Column names plus row-major records in a fixed order."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        rows = tuple(tuple(_plain(v) for v in r) for r in self.rows)
        for r in rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row has {len(r)} cells, expected {len(self.columns)}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_records(cls, records: Sequence[Mapping[str, Any]], columns=None) -> "ResultTable":
        if columns is None:
            columns = tuple(records[0]) if records else ()
        return cls(tuple(columns), tuple(tuple(r[c] for c in columns) for r in records))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([format_cell(v) for v in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        return cls(tuple(header), tuple(tuple(parse_cell(c) for c in row) for row in reader))

    def to_json_obj(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "ResultTable":
        return cls(tuple(obj["columns"]), tuple(tuple(r) for r in obj["rows"]))

    @classmethod
    def from_json(cls, text: str) -> "ResultTable":
        return cls.from_json_obj(json.loads(text))


def tables_to_json(tables: Mapping[str, ResultTable]) -> str:
    return json.dumps({k: t.to_json_obj() for k, t in tables.items()}, indent=2) + "\n"


def tables_from_json(text: str) -> dict[str, ResultTable]:
    return {k: ResultTable.from_json_obj(v) for k, v in json.loads(text).items()}


def write_tables(
    tables: Mapping[str, ResultTable], fmt: str = "csv", output: Optional[Path] = None, stream=None
) -> list[Path]:
    """Emit ``tables`` to ``output`` or to ``stream``.

    JSON always produces one document keyed by table name. CSV with a
    single table writes ``output`` as a file; with several tables
    ``output`` is a directory holding ``<name>.csv`` files. On a stream,
    each CSV table is preceded by a ``# name`` line.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    written: list[Path] = []
    if output is None:
        if fmt == "json":
            stream.write(tables_to_json(tables))
        else:
            for i, (name, t) in enumerate(tables.items()):
                if len(tables) > 1:
                    stream.write(("\n" if i else "") + f"# {name}\n")
                stream.write(t.to_csv())
        return written
    output = Path(output)
    if fmt == "json":
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(tables_to_json(tables), newline="\n")
        return [output]
    if len(tables) == 1:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(next(iter(tables.values())).to_csv(), newline="\n")
        return [output]
    output.mkdir(parents=True, exist_ok=True)
    for name, t in tables.items():
        path = output / f"{name}.csv"
        path.write_text(t.to_csv(), newline="\n")
        written.append(path)
    return written

