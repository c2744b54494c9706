"""Reader for the frozen CSV dialect emitted by liouville-lab.

Dialect: comma separator, '.' decimal point, '#' comment header lines, LF
endings.  Files must start with a tool banner comment and carry the exact
column set the figure expects.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


class MissingArtifact(FileNotFoundError):
    """A required input CSV does not exist."""


class MalformedCsv(ValueError):
    """An input file violates the frozen dialect or its column contract."""


def load_table(path, expected_columns: list[str]) -> dict[str, np.ndarray]:
    """Parse one artifact; returns a column-name -> float-array mapping."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifact(f"artifact not found: {path}")
    lines = path.read_text().splitlines()
    body = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    comments = [ln for ln in lines if ln.startswith("#")]
    if not comments or "liouville-lab" not in comments[0]:
        raise MalformedCsv(f"{path}: missing tool banner comment")
    if not body:
        raise MalformedCsv(f"{path}: no header row")
    columns = body[0].split(",")
    if columns != expected_columns:
        raise MalformedCsv(
            f"{path}: columns {columns} do not match expected {expected_columns}"
        )
    rows = []
    for ln in body[1:]:
        cells = ln.split(",")
        if len(cells) != len(columns):
            raise MalformedCsv(f"{path}: ragged row {ln!r}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise MalformedCsv(f"{path}: non-numeric cell in {ln!r}") from exc
    if not rows:
        raise MalformedCsv(f"{path}: no data rows")
    data = np.asarray(rows)
    return {name: data[:, i] for i, name in enumerate(columns)}
