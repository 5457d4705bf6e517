"""Deterministic CSV / JSON / SVG writers.

Floats are written with 12 significant digits, '.' as decimal separator and
'\\n' line endings; files are written to a temporary name and renamed.
"""
from __future__ import annotations

import enum
import json
import os
import tempfile
from pathlib import Path

import numpy as np

SIG = 12


def fmt(x) -> str:
    return f"{float(x):.{SIG}g}"


def clean(obj):
    """Recursively convert numpy/enum values and round floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    return obj


def write_atomic(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path: Path, obj) -> Path:
    return write_atomic(path, json.dumps(clean(obj), indent=2, sort_keys=True) + "\n")


def spectrum_csv(times, deltas, values) -> str:
    lines = ["t,delta,N"]
    for t, row in zip(times, values):
        ts = fmt(t)
        lines.extend(f"{ts},{fmt(d)},{fmt(v)}" for d, v in zip(deltas, row))
    return "\n".join(lines) + "\n"


def table_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


_COLOURS = ("#1f5fbf", "#c0392b", "#27ae60", "#8e44ad", "#a0522d", "#000000")


def svg_plot(x, curves, labels, xlabel="Delta / omega_M", ylabel="N", width=720, height=420) -> str:
    """Static line plot with axes, ticks and a legend."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(c, dtype=float) for c in curves]
    left, right, top, bottom = 70, 20, 20, 50
    pw, ph = width - left - right, height - top - bottom
    xmin, xmax = float(x.min()), float(x.max())
    ymax = max((float(y.max()) for y in ys), default=1.0) or 1.0
    sx = lambda v: left + (v - xmin) / (xmax - xmin or 1.0) * pw
    sy = lambda v: top + ph - v / ymax * ph
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for v in np.linspace(xmin, xmax, 9):
        px = sx(v)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" text-anchor="middle">{v:g}</text>')
    for v in np.linspace(0.0, ymax, 5):
        py = sy(v)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="15" y="{top + ph / 2}" text-anchor="middle" transform="rotate(-90 15 {top + ph / 2})">{ylabel}</text>')
    for i, (y, label) in enumerate(zip(ys, labels)):
        colour = _COLOURS[i % len(_COLOURS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 14 * (i + 1)
        out.append(f'<line x1="{left + pw - 90}" y1="{ly - 4}" x2="{left + pw - 70}" y2="{ly - 4}" stroke="{colour}"/>')
        out.append(f'<text x="{left + pw - 65}" y="{ly}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
