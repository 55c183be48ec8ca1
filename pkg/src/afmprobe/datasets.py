"""Dataset container and CSV/JSON writers with provenance headers.

Numbers are written in shortest round-trip decimal form, so CSV bodies are
byte-identical across runs of the same config (the timestamp line is the
only varying header field).  Rows flagged unstable may carry NaN cells;
stable rows never do, which the writer enforces.
"""

from __future__ import annotations

import datetime
import json
import math
import os
from dataclasses import dataclass, field

from . import __version__
from .errors import ProbeError


def _native(value):
    """Numpy scalars to plain Python so repr/json stay portable."""
    if isinstance(value, bool):
        return value
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return value.item()
    return value


@dataclass
class Dataset:
    """Tabular result with column names, per-column units, and provenance.

    ``flag_values`` lists (column, good_value) pairs; a row matching every
    good value is considered clean and must be NaN-free, which the writers
    enforce.
    """

    schema: str
    columns: tuple
    units: tuple
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    flag_values: tuple = (("stable", True),)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("one unit per column required")

    def append(self, row):
        row = tuple(_native(v) for v in row)
        if len(row) != len(self.columns):
            raise ValueError(f"row width {len(row)} != {len(self.columns)}")
        self.rows.append(row)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def check_no_nan_on_clean_rows(self):
        flags = [(self.columns.index(c), good) for c, good in self.flag_values
                 if c in self.columns]
        if not flags:
            return
        for i, row in enumerate(self.rows):
            clean = all(row[j] == good for j, good in flags)
            if clean and any(isinstance(v, float) and math.isnan(v)
                             for v in row):
                raise ProbeError(f"clean row {i} contains NaN")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _provenance_lines(ds: Dataset):
    lines = [f"# schema: {ds.schema}",
             f"# tool_version: afmprobe {__version__}"]
    for key in sorted(ds.provenance):
        lines.append(f"# {key}: {ds.provenance[key]}")
    lines.append(f"# timestamp: {_timestamp()}")
    units = ", ".join(f"{c}={u}" for c, u in zip(ds.columns, ds.units))
    lines.append(f"# units: {units}")
    return lines


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%SZ")


def write_csv(ds: Dataset, path) -> str:
    ds.check_no_nan_on_clean_rows()
    lines = _provenance_lines(ds)
    lines.append(",".join(ds.columns))
    for row in ds.rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return str(path)


def write_json(ds: Dataset, path) -> str:
    ds.check_no_nan_on_clean_rows()
    payload = {
        "schema": ds.schema,
        "tool_version": f"afmprobe {__version__}",
        "provenance": {**ds.provenance, "timestamp": _timestamp()},
        "columns": list(ds.columns),
        "units": list(ds.units),
        "rows": [[None if isinstance(v, float) and math.isnan(v) else v
                  for v in row] for row in ds.rows],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    return str(path)


def write_dataset(ds: Dataset, directory, stem: str, formats) -> list:
    """Write the dataset in every requested format; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for fmt in formats:
        path = os.path.join(directory, f"{stem}.{fmt}")
        if fmt == "csv":
            written.append(write_csv(ds, path))
        elif fmt == "json":
            written.append(write_json(ds, path))
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return written
