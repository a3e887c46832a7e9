"""CSV and SVG artifacts.

CSV files are comma-separated with a header row and '.' decimals; floats are
written with 17 significant digits so they read back bit-identically.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .solver import Grid1D, Trajectory

FULL_COLUMNS = ("t", "x", "rho1", "rho2", "rho_total")
REDUCED_COLUMNS = ("t", "x", "rho")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def write_rows(path_or_buf, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    own = not hasattr(path_or_buf, "write")
    fh = open(path_or_buf, "w", newline="", encoding="utf-8") if own else path_or_buf
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if own:
            fh.close()


def write_records(path_or_buf, records: Sequence[Mapping]) -> None:
    """Rows of dicts sharing the keys of the first record."""
    header = list(records[0]) if records else []
    write_rows(path_or_buf, header, ([r.get(k) for k in header] for r in records))


def trajectory_to_csv(traj: Trajectory, path_or_buf) -> None:
    x = traj.x
    if traj.model == "reduced":
        rows = ((t, xi, v) for k, t in enumerate(traj.times) for xi, v in zip(x, traj.rho[k]))
        write_rows(path_or_buf, REDUCED_COLUMNS, rows)
        return
    total = traj.total
    rows = (
        (t, xi, a, b, c)
        for k, t in enumerate(traj.times)
        for xi, a, b, c in zip(x, traj.rho1[k], traj.rho2[k], total[k])
    )
    write_rows(path_or_buf, FULL_COLUMNS, rows)


def trajectory_to_string(traj: Trajectory) -> str:
    buf = io.StringIO()
    trajectory_to_csv(traj, buf)
    return buf.getvalue()


def read_trajectory_csv(path) -> Trajectory:
    """Rebuild a trajectory written by :func:`trajectory_to_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        data = np.array([[float(v) for v in row] for row in reader if row])
    if header not in (FULL_COLUMNS, REDUCED_COLUMNS):
        raise ValueError(f"unrecognised trajectory header {header}")
    if data.size == 0:
        raise ValueError("trajectory file has no rows")
    times = np.unique(data[:, 0])
    n_t = len(times)
    if data.shape[0] % n_t:
        raise ValueError("snapshots have unequal lengths")
    n = data.shape[0] // n_t
    block = data.reshape(n_t, n, -1)
    x = block[0, :, 1]
    dx = (x[-1] - x[0]) / (n - 1)
    grid = Grid1D(float(n * dx), int(n))
    if header == REDUCED_COLUMNS:
        return Trajectory("reduced", grid, block[:, 0, 0], rho=block[:, :, 2].copy())
    return Trajectory("full", grid, block[:, 0, 0], rho1=block[:, :, 2].copy(), rho2=block[:, :, 3].copy())


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def svg_line_plot(series: Sequence[tuple[str, np.ndarray, np.ndarray]], path, xlabel="x", ylabel="", title=""):
    """Minimal static SVG with one polyline per ``(label, x, y)`` series."""
    w, h, m = 640, 400, 50
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(0.0, float(ys.min())), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    sx = lambda v: m + (v - x0) / (x1 - x0) * (w - 2 * m)
    sy = lambda v: h - m - (v - y0) / (y1 - y0) * (h - 2 * m)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{m}" y1="{h - m}" x2="{w - m}" y2="{h - m}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{h - m}" stroke="black"/>',
        f'<text x="{w / 2}" y="{h - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{h / 2}" text-anchor="middle" transform="rotate(-90 14 {h / 2})">{ylabel}</text>',
        f'<text x="{m}" y="{h - m + 16}" text-anchor="middle">{x0:.4g}</text>',
        f'<text x="{w - m}" y="{h - m + 16}" text-anchor="middle">{x1:.4g}</text>',
        f'<text x="{m - 4}" y="{h - m}" text-anchor="end">{y0:.3g}</text>',
        f'<text x="{m - 4}" y="{m + 4}" text-anchor="end">{y1:.3g}</text>',
    ]
    if title:
        out.append(f'<text x="{w / 2}" y="20" text-anchor="middle">{title}</text>')
    for k, (label, x, y) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        x, y = np.asarray(x, float), np.asarray(y, float)
        stride = max(1, len(x) // 1500)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[::stride], y[::stride]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{w - m - 4}" y="{m + 14 * (k + 1)}" text-anchor="end" fill="{color}">{label}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
