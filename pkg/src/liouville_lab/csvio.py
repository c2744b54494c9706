"""Frozen CSV dialect and JSON envelope shared by the CLI and the renderer.

Dialect: comma separator, '.' decimal point, '#'-prefixed comment header
lines, LF endings.  Headers carry the tool version plus key=value metadata;
no timestamps, so identical configs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from . import __version__


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        x = float(x)  # numpy scalars repr as np.float64(...) otherwise
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def header_lines(meta: dict | None = None, command: str | None = None) -> list[str]:
    lines = [f"# liouville-lab v{__version__}"]
    if command:
        lines.append(f"# command: {command}")
    if meta:
        pairs = " ".join(f"{k}={_fmt(v)}" for k, v in meta.items())
        lines.append(f"# config: {pairs}")
    return lines


def write_csv(path, columns: list[str], rows, meta: dict | None = None,
              command: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = header_lines(meta, command)
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(out) + "\n", newline="\n")
    return path


def write_json(path, columns: list[str], rows, meta: dict | None = None,
               command: str | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "tool": f"liouville-lab v{__version__}",
        "command": command,
        "config": meta or {},
        "rows": [dict(zip(columns, row)) for row in rows],
    }
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", newline="\n")
    return path


def read_csv(path) -> tuple[list[str], list[list[float]], list[str]]:
    """Parse a file in the frozen dialect; returns (columns, rows, comments)."""
    comments, columns, rows = [], None, []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cells = line.split(",")
        if columns is None:
            columns = cells
            continue
        rows.append([float(c) for c in cells])
    if columns is None:
        raise ValueError(f"{path}: no header row")
    return columns, rows, comments
