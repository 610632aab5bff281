"""Minimal SVG line plots: axes, one polyline per group, point markers."""

from __future__ import annotations

import csv
import math
from typing import Optional
from xml.sax.saxutils import escape

W, H = 640, 420
MARGIN = 56
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")

# default (x, y, group) columns for the CSV schemas the CLI writes
SCHEMA_DEFAULTS = {
    ("n", "x", "j", "N", "mu", "ratio"): ("j", "ratio", "n"),
    ("n", "eps"): ("n", "eps_scaled", None),
    ("kind", "level"): ("level", "ratio", "kind"),
    ("kind", "base", "k", "start", "face", "prob"): ("k", "prob", "face"),
    ("x", "y", "mu", "depth"): ("depth", "upper", None),
}


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def default_columns(header) -> tuple:
    for key, cols in SCHEMA_DEFAULTS.items():
        if tuple(header[: len(key)]) == key:
            return cols
    return header[0], header[1], None


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    if hi <= lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (step * m) <= n:
            step *= m
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def render_svg(series: dict, xlabel: str, ylabel: str, title: str = "") -> str:
    """``series`` maps a label to a list of ``(x, y)`` points."""
    pts = [p for s in series.values() for p in s]
    if not pts:
        raise ValueError("nothing to plot")
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw, ph = W - 2 * MARGIN, H - 2 * MARGIN

    def sx(v):
        return MARGIN + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return H - MARGIN - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">']
    out.append(f'<line x1="{MARGIN}" y1="{H - MARGIN}" x2="{W - MARGIN}" y2="{H - MARGIN}" stroke="black"/>')
    out.append(f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{H - MARGIN}" stroke="black"/>')
    for t in _ticks(x0, x1):
        X = _fmt(sx(t))
        out.append(f'<line x1="{X}" y1="{H - MARGIN}" x2="{X}" y2="{H - MARGIN + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{H - MARGIN + 18}" font-size="11" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        Y = _fmt(sy(t))
        out.append(f'<line x1="{MARGIN - 5}" y1="{Y}" x2="{MARGIN}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{MARGIN - 8}" y="{Y}" font-size="11" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{W / 2}" y="{H - 14}" font-size="13" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{H / 2}" font-size="13" text-anchor="middle">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{W / 2}" y="24" font-size="14" text-anchor="middle">{escape(title)}</text>')
    for i, (label, s) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        s = sorted(s)
        coords = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in s)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for a, b in s:
            out.append(f'<circle cx="{_fmt(sx(a))}" cy="{_fmt(sy(b))}" r="3" fill="{color}"/>')
        out.append(
            f'<text x="{W - MARGIN + 4}" y="{MARGIN + 14 * i}" font-size="11" fill="{color}">{escape(str(label))}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_csv(path, x: Optional[str] = None, y: Optional[str] = None, group: Optional[str] = None) -> str:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
        header = list(rows[0].keys()) if rows else []
    if not rows:
        raise ValueError("empty CSV")
    dx, dy, dg = default_columns(header)
    x, y = x or dx, y or dy
    group = group if group is not None else dg
    for col in (x, y) + ((group,) if group else ()):
        if col not in header:
            raise ValueError(f"column {col!r} not in CSV")
    series = {}
    for r in rows:
        key = r[group] if group else y
        series.setdefault(key, []).append((_num(r[x]), _num(r[y])))
    return render_svg(series, x, y, title=f"{y} vs {x}" + (f" by {group}" if group else ""))


def _num(s: str) -> float:
    if "/" in s:
        p, q = s.split("/")
        return int(p) / int(q)
    return float(s)
