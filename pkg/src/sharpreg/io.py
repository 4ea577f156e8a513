"""CSV tables with ``#``-prefixed metadata lines.

Values are written with ``repr`` so that files round-trip exactly and
identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Sequence


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], meta: dict | None = None) -> str:
    buf = io.StringIO(newline="")
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    meta: dict | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(render_csv(header, rows, meta))
    return path


def read_csv(path: str | Path) -> tuple[dict, list[str], list[list[str]]]:
    meta: dict = {}
    data_lines = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                try:
                    meta[key.strip()] = json.loads(value)
                except json.JSONDecodeError:
                    meta[key.strip()] = value.strip()
            elif line.strip():
                data_lines.append(line)
    reader = csv.reader(data_lines)
    header = next(reader)
    return meta, header, [row for row in reader]
