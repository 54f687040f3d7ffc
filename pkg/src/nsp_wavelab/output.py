"""Deterministic CSV output with a commented metadata header."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from nsp_wavelab import __version__

REPORT_COLUMNS = ("t", "X", "Xdot", "Linf_v", "Linf_u", "Linf_phi", "L2_v", "L2_u", "H2_v", "H2_u",
                  "eta_weighted", "G1", "G2", "G3", "GS", "GR", "D", "mass_balance_residual")
SNAPSHOT_COLUMNS = ("xi", "v", "u", "phi", "vbar", "ubar", "phibar")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def metadata_lines(meta: dict | None) -> list[str]:
    lines = [f"# nsp_wavelab {__version__}"]
    for key, val in (meta or {}).items():
        lines.append(f"# {key} = {fmt(val)}")
    return lines


def atomic_write(path: str | Path, text: str) -> Path:
    """Write via a temporary file in the same directory and rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(columns, rows, meta: dict | None = None) -> str:
    lines = metadata_lines(meta) if meta is not None else []
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def write_csv(path, columns, rows, meta: dict | None = None) -> Path:
    return atomic_write(path, csv_text(columns, rows, meta))


def array_rows(columns, arrays: dict):
    n = len(arrays[columns[0]])
    for i in range(n):
        yield {c: arrays[c][i] for c in columns}


def snapshot_name(t: float) -> str:
    return f"snapshot_{format(float(t), 'g')}.csv"
