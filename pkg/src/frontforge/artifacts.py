"""Deterministic CSV/JSON writers and plot-ready text series."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import MissingArtifact


def fmt(x) -> str:
    """Round-trip float text with 17 significant digits."""
    return format(float(x), ".17g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _encode(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, float):
        # JSON has no NaN/inf; null keeps the file standard-conforming
        return fmt(obj) if math.isfinite(obj) else "null"
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and no trailing whitespace."""
    return _encode(_plain(obj), indent, 0) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def write_csv(path, header, columns):
    """Write equal-length numeric columns."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in zip(*cols):
            wr.writerow([fmt(v) if np.issubdtype(type(v), np.floating) else v for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


#: artifact file -> (output file, x column, y column, group column)
PLOT_SERIES = {
    "profile": ("profile.csv", "profile.dat", "phi", "W", None),
    "residual": ("history.csv", "residual.dat", "iteration", "residual", None),
    "action": ("history.csv", "action.dat", "iteration", "action", None),
    "curve": ("curve.csv", "curve.dat", "r_minus", "r_plus", "curve"),
}


def emit_plotdata(output_dir, kinds=None):
    """Two-column whitespace-separated series derived from run artifacts.

    Parameters
    ----------
    output_dir : path
        Directory holding the CSV artifacts of a run.
    kinds : iterable of str, optional
        Subset of ``PLOT_SERIES``.  Without it every series whose source
        exists is written.

    Returns
    -------
    list of Path
        Written files.  Separate curves are split by blank lines.

    Raises
    ------
    MissingArtifact
        If a requested source is absent, or no source exists at all.
    """
    out = Path(output_dir)
    wanted = list(PLOT_SERIES) if kinds is None else list(kinds)
    written = []
    for kind in wanted:
        if kind not in PLOT_SERIES:
            raise ValueError(f"unknown plot series {kind!r}")
        src, dst, xcol, ycol, group = PLOT_SERIES[kind]
        if not (out / src).exists():
            if kinds is not None:
                raise MissingArtifact(f"{src} not found in {out}")
            continue
        rows = read_csv(out / src)
        lines, prev = [], None
        for row in rows:
            if group is not None and prev is not None and row[group] != prev:
                lines.append("")
            prev = row[group] if group is not None else None
            lines.append(f"{row[xcol]} {row[ycol]}")
        (out / dst).write_text("\n".join(lines) + "\n")
        written.append(out / dst)
    if not written:
        raise MissingArtifact(f"no plottable artifacts in {out}")
    return written
