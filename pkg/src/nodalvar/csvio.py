"""Deterministic CSV emission shared by the reports and the CLI."""
from __future__ import annotations

import io
import math
from pathlib import Path

DEFAULT_PRECISION = 6


def fmt(value, precision: int = DEFAULT_PRECISION) -> str:
    """Scientific notation with ``precision`` significant digits; text passes through."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool,)):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{max(precision, 1) - 1}e}"


def regions_label(regions) -> str:
    return ",".join(str(r) for r in regions)


def render(header, rows, metadata=None, precision: int = DEFAULT_PRECISION) -> str:
    """CSV text with ``#``-prefixed metadata lines, a header row and LF endings."""
    out = io.StringIO()
    for key, value in (metadata or {}).items():
        out.write(f"# {key}: {value}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_cell(v, precision) for v in row) + "\n")
    return out.getvalue()


def _cell(value, precision):
    text = fmt(value, precision)
    if "," in text or '"' in text:
        text = '"' + text.replace('"', '""') + '"'
    return text


def write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    return path


def read(path) -> tuple[list[str], list[list[str]], dict[str, str]]:
    """Inverse of :func:`render`: header, string rows and metadata."""
    import csv

    meta: dict[str, str] = {}
    lines = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            elif line.strip():
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader], meta
