"""Dataset documents: hyperplanes, optional points and metadata."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass
class Dataset:
    d: int
    hyperplanes: list
    points: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.hyperplanes = [tuple(float(v) for v in h) for h in self.hyperplanes]
        self.points = [tuple(float(v) for v in p) for p in self.points]
        validate(self)

    @property
    def H(self) -> np.ndarray:
        return np.array(self.hyperplanes, dtype=float).reshape(len(self.hyperplanes), self.d)

    def dumps(self) -> str:
        return dumps(self)


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _rows(rows) -> str:
    return ",\n".join("    [" + ", ".join(_num(v) for v in r) + "]" for r in rows)


def dumps(ds: Dataset) -> str:
    parts = ["{", f'  "d": {ds.d},', '  "hyperplanes": [', _rows(ds.hyperplanes), "  ],",
             '  "points": [']
    if ds.points:
        parts.append(_rows(ds.points))
    parts.append("  ],")
    parts.append('  "metadata": ' + json.dumps(ds.metadata, sort_keys=True))
    parts.append("}")
    return "\n".join(parts) + "\n"


def validate(ds: Dataset, lines: dict | None = None) -> None:
    lines = lines or {}
    if ds.d < 1:
        raise DatasetError("d must be at least 1")
    if not ds.hyperplanes:
        raise DatasetError("no hyperplanes")
    for key, rows in (("hyperplanes", ds.hyperplanes), ("points", ds.points)):
        for r, row in enumerate(rows):
            where = lines.get((key, r))
            if len(row) != ds.d:
                raise DatasetError(f"{key}[{r}] has {len(row)} coordinates, expected d={ds.d}", where)
            if not all(np.isfinite(row)):
                raise DatasetError(f"{key}[{r}] has a non-finite coordinate", where)
            if key == "hyperplanes" and not any(row):
                raise DatasetError(f"hyperplanes[{r}] is the zero vector", where)


_ROW = re.compile(r"\[[^\[\]]*\]")


def _row_lines(text: str, key: str) -> list:
    """Line number of each row of the array named ``key`` (one row per line format)."""
    m = re.search(r'"%s"\s*:\s*\[' % key, text)
    if not m:
        return []
    depth, i = 1, m.end()
    out = []
    while i < len(text) and depth:
        ch = text[i]
        if ch == "[":
            r = _ROW.match(text, i)
            if r:
                out.append(text.count("\n", 0, i) + 1)
                i = r.end()
                continue
            depth += 1
        elif ch == "]":
            depth -= 1
        i += 1
    return out


def loads(text: str) -> Dataset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DatasetError(e.msg, e.lineno) from None
    if not isinstance(doc, dict) or "hyperplanes" not in doc:
        raise DatasetError("expected an object with a 'hyperplanes' array")
    lines = {}
    for key in ("hyperplanes", "points"):
        for r, ln in enumerate(_row_lines(text, key)):
            lines[(key, r)] = ln
    rows = doc["hyperplanes"]
    pts = doc.get("points") or []
    for key, rr in (("hyperplanes", rows), ("points", pts)):
        if not isinstance(rr, list) or not all(isinstance(r, list) for r in rr):
            raise DatasetError(f"'{key}' must be a list of rows")
        for r, row in enumerate(rr):
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row):
                raise DatasetError(f"{key}[{r}] has a non-numeric entry", lines.get((key, r)))
    d = doc.get("d", len(rows[0]) if rows else 0)
    if not isinstance(d, int) or isinstance(d, bool):
        raise DatasetError("'d' must be an integer")
    ds = Dataset.__new__(Dataset)
    ds.d = d
    ds.hyperplanes = [tuple(float(v) for v in h) for h in rows]
    ds.points = [tuple(float(v) for v in p) for p in pts]
    ds.metadata = doc.get("metadata") or {}
    validate(ds, lines)
    return ds


def loads_csv(text: str) -> Dataset:
    """One hyperplane per row; blank lines and lines starting with '#' are skipped."""
    rows, lines = [], {}
    reader = csv.reader(io.StringIO(text))
    for rec in reader:
        if not rec or rec[0].lstrip().startswith("#") or not any(c.strip() for c in rec):
            continue
        try:
            vals = tuple(float(c) for c in rec)
        except ValueError:
            raise DatasetError("non-numeric entry", reader.line_num) from None
        lines[("hyperplanes", len(rows))] = reader.line_num
        rows.append(vals)
    if not rows:
        raise DatasetError("no hyperplanes")
    ds = Dataset.__new__(Dataset)
    ds.d = len(rows[0])
    ds.hyperplanes = rows
    ds.points = []
    ds.metadata = {}
    validate(ds, lines)
    return ds


def load(path: str, as_csv: bool = False) -> Dataset:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return loads_csv(text) if as_csv else loads(text)
