"""CSV and sidecar writers for run artifacts.

All floats are serialized with 17 significant digits so artifacts are
bit-reproducible across runs of the same configuration.
"""
from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

__all__ = ["format_float", "write_csv", "read_csv", "write_meta", "config_hash"]


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_csv(path, header: list, columns: list) -> None:
    """Write columns (equal-length sequences) under a single header row."""
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0])
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(
            format_float(c[i]) if np.issubdtype(c.dtype, np.floating) else str(c[i])
            for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    """Read a dnlfront CSV back as (header, dict of columns).

    Columns parse as float where possible and fall back to strings.
    """
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    rows = [line.split(",") for line in text[1:]]
    data = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        try:
            data[name] = np.array([float(x) for x in raw])
        except ValueError:
            data[name] = np.array(raw)
    return header, data


def write_meta(path, entries: dict) -> None:
    """Plain-text key=value sidecar, sorted for reproducibility."""
    lines = [f"{k}={entries[k]}" for k in sorted(entries)]
    Path(path).write_text("\n".join(lines) + "\n")


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]
