"""Plain CSV writing with round-trip float formatting."""
from __future__ import annotations

import os

import numpy as np


def fmt(value):
    """Format a number with 17 significant digits (ints stay ints)."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def write_csv(path, header, rows, preamble=()):
    """Write ``rows`` under ``header``; ``preamble`` lines go first verbatim."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in preamble:
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_csv(path):
    """Read a CSV written by :func:`write_csv`; returns (preamble, header, rows)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    preamble = []
    while lines and lines[0].startswith("#"):
        preamble.append(lines.pop(0))
    header = lines[0].split(",") if lines else []
    rows = [line.split(",") for line in lines[1:]]
    return preamble, header, rows
