"""Deterministic CSV/JSON writers shared by the command-line tools.

Numbers are printed with 12 significant digits, rows in a fixed order,
LF line endings, UTF-8: identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

SCHEMA_VERSION = 1


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".12g")


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, indent=2, allow_nan=False) + "\n",
        encoding="utf-8",
        newline="\n",
    )
