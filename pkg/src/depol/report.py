"""Deterministic delimited output: 17-significant-digit CSV text."""

from __future__ import annotations

import sys
from collections.abc import Iterable

import numpy as np


def fmt(value) -> str:
    """Serialize a scalar with 17 significant digits (round-trips doubles).

    Booleans become ``true``/``false``; NaN prints as ``nan``; strings pass
    through unchanged.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if x != x:
        return "nan"
    if x == float("inf"):
        return "inf"
    if x == float("-inf"):
        return "-inf"
    return format(x, ".17g")


def csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_output(text: str, out_path: str | None) -> None:
    """Write report text to a file, or to stdout when out_path is None or '-'."""
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
