"""ECE profiles over prior log10-odds, with CSV and SVG output."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from .metrics import LN10, ece_at_log_odds, perfect_privacy_at_log_odds
from .types import CalibratedLLRs, EceProfile, GridMismatch, InvalidGrid, ZebraReport

DEFAULT_GRID = (-4.0, 4.0, 201)

NamedProfile = Tuple[str, EceProfile]


def make_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise InvalidGrid(f"grid needs finite lo < hi, got {lo!r}:{hi!r}")
    if int(n) != n or n < 2:
        raise InvalidGrid(f"grid needs at least 2 points, got {n!r}")
    return np.linspace(lo, hi, int(n))


def parse_grid(text: str) -> Tuple[float, float, int]:
    """Parse ``lo:hi:n``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidGrid(f"grid must look like lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidGrid(f"grid must look like lo:hi:n, got {text!r}") from None
    make_grid(lo, hi, n)
    return lo, hi, n


def build_profile(
    cal: CalibratedLLRs,
    lo: float = DEFAULT_GRID[0],
    hi: float = DEFAULT_GRID[1],
    n: int = DEFAULT_GRID[2],
) -> EceProfile:
    grid = make_grid(lo, hi, n)
    logit = grid * LN10
    return EceProfile(grid, ece_at_log_odds(cal, logit), perfect_privacy_at_log_odds(logit))


def _shared_grid(profiles: Sequence[NamedProfile]) -> np.ndarray:
    if not profiles:
        raise InvalidGrid("no profiles given")
    grid = profiles[0][1].grid
    for name, prof in profiles[1:]:
        if not np.array_equal(prof.grid, grid):
            raise GridMismatch(f"profile {name!r} uses a different grid")
    return grid


def _num(x: float) -> str:
    return format(float(x), ".17g")


def emit_csv(profiles: Sequence[NamedProfile]) -> str:
    grid = _shared_grid(profiles)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["log10_odds", "perfect_privacy_ece"] + [name for name, _ in profiles])
    ref = profiles[0][1].perfect_privacy_ece
    for i, x in enumerate(grid):
        writer.writerow([_num(x), _num(ref[i])] + [_num(p.ece[i]) for _, p in profiles])
    return buf.getvalue()


def parse_csv(text: str) -> List[NamedProfile]:
    """Inverse of :func:`emit_csv`."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:2] != ["log10_odds", "perfect_privacy_ece"]:
        raise InvalidGrid("not a profile CSV")
    names = rows[0][2:]
    data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != len(names) + 2:
        raise InvalidGrid("ragged profile CSV")
    grid, ref = data[:, 0], data[:, 1]
    return [(name, EceProfile(grid, data[:, 2 + k], ref)) for k, name in enumerate(names)]


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


@dataclass(frozen=True)
class PlotStyle:
    width: int = 640
    height: int = 400
    y_max: Optional[float] = None
    palette: Tuple[str, ...] = PALETTE
    title: str = "ECE profiles"
    stroke_width: float = 1.5


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, target: int = 8) -> List[float]:
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9)
    out = []
    k = first
    while k * step <= hi + 1e-9 * step:
        out.append(k * step)
        k += 1
    return out


def zebra_label(report: ZebraReport) -> str:
    return f"({report.d_ece:.2f}, {report.log10_l:.2f}, {report.tag})"


def emit_svg(
    profiles: Sequence[NamedProfile],
    style: Optional[PlotStyle] = None,
    reports: Optional[Dict[str, ZebraReport]] = None,
) -> str:
    """Standalone SVG: perfect-privacy curve in black plus one line per profile.

    Legend entries carry the ZEBRA tuple when ``reports`` has one for the
    profile's source id.
    """
    style = style or PlotStyle()
    reports = reports or {}
    grid = _shared_grid(profiles)
    ref = profiles[0][1].perfect_privacy_ece

    w, h = style.width, style.height
    left, right, top, bottom = 56.0, 16.0, 28.0, 44.0
    pw, ph = w - left - right, h - top - bottom
    x0, x1 = float(grid[0]), float(grid[-1])
    y_top = style.y_max
    if y_top is None:
        peak = max([float(ref.max())] + [float(p.ece.max()) for _, p in profiles])
        y_top = max(1.0, math.ceil(peak * 10.0) / 10.0)

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - min(max(y, 0.0), y_top) / y_top * ph

    def points(values):
        return " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(grid, values))

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
        f'<text x="{_fmt(w / 2)}" y="18" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{escape(style.title)}</text>',
        f'<g stroke="#000000" stroke-width="1" fill="none">'
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(pw)}" height="{_fmt(ph)}"/></g>',
    ]

    tick_lines = ['<g font-family="sans-serif" font-size="10" fill="#000000">']
    for xt in _ticks(x0, x1):
        tick_lines.append(
            f'<line x1="{_fmt(px(xt))}" y1="{_fmt(top + ph)}" x2="{_fmt(px(xt))}" '
            f'y2="{_fmt(top + ph + 4)}" stroke="#000000"/>'
            f'<text x="{_fmt(px(xt))}" y="{_fmt(top + ph + 16)}" text-anchor="middle">{xt:g}</text>'
        )
    for yt in _ticks(0.0, y_top, 5):
        tick_lines.append(
            f'<line x1="{_fmt(left - 4)}" y1="{_fmt(py(yt))}" x2="{_fmt(left)}" '
            f'y2="{_fmt(py(yt))}" stroke="#000000"/>'
            f'<text x="{_fmt(left - 7)}" y="{_fmt(py(yt) + 3)}" text-anchor="end">{yt:g}</text>'
        )
    tick_lines.append(
        f'<text x="{_fmt(left + pw / 2)}" y="{_fmt(h - 8)}" text-anchor="middle">'
        "prior log10 odds log10(π/(1−π))</text>"
    )
    tick_lines.append(
        f'<text x="14" y="{_fmt(top + ph / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_fmt(top + ph / 2)})">ECE (bits)</text>'
    )
    tick_lines.append("</g>")
    out.extend(tick_lines)

    out.append(
        f'<polyline class="perfect-privacy" fill="none" stroke="#000000" '
        f'stroke-width="{style.stroke_width}" points="{points(ref)}"/>'
    )
    for k, (name, prof) in enumerate(profiles):
        color = style.palette[k % len(style.palette)]
        out.append(
            f'<polyline class="profile" fill="none" stroke="{color}" '
            f'stroke-width="{style.stroke_width}" points="{points(prof.ece)}"/>'
        )

    entries = [("perfect privacy", "#000000")]
    for k, (name, _) in enumerate(profiles):
        label = name
        if name in reports:
            label = f"{name} {zebra_label(reports[name])}"
        entries.append((label, style.palette[k % len(style.palette)]))
    lx, ly = left + pw - 230.0, top + 10.0
    out.append('<g class="legend" font-family="sans-serif" font-size="10">')
    for i, (label, color) in enumerate(entries):
        y = ly + 14.0 * i
        out.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(y)}" x2="{_fmt(lx + 18)}" y2="{_fmt(y)}" '
            f'stroke="{color}" stroke-width="2"/>'
            f'<text x="{_fmt(lx + 24)}" y="{_fmt(y + 3.5)}">{escape(label)}</text>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
