"""Minimal SVG line-chart emitter for eyeballing sweep output.

Deliberately tiny: axes, a handful of polylines, a legend.  No styling
options beyond series labels; anything fancier belongs in a real plotting
tool fed from the CSV output.
"""

from __future__ import annotations

from .util import fmt12

_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 60, 20, 30, 45


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def line_chart(series, title: str = "", x_label: str = "", y_label: str = "") -> str:
    """Render [(label, xs, ys), ...] as an SVG document string."""
    if not series:
        raise ValueError("need at least one series")
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>',
        f'<text x="{_W // 2}" y="{_H - 10}" text-anchor="middle" font-size="12">{x_label}</text>',
        f'<text x="15" y="{_H // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {_H // 2})">{y_label}</text>',
        f'<text x="{_ML - 5}" y="{_H - _MB + 4}" text-anchor="end" font-size="10">{fmt12(y_lo)}</text>',
        f'<text x="{_ML - 5}" y="{_MT + 4}" text-anchor="end" font-size="10">{fmt12(y_hi)}</text>',
        f'<text x="{_ML}" y="{_H - _MB + 15}" text-anchor="middle" font-size="10">{fmt12(x_lo)}</text>',
        f'<text x="{_W - _MR}" y="{_H - _MB + 15}" text-anchor="middle" font-size="10">{fmt12(x_hi)}</text>',
    ]
    for k, (label, xs, ys) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        px = _scale(xs, x_lo, x_hi, _ML, _W - _MR)
        py = _scale(ys, y_lo, y_hi, _H - _MB, _MT)
        points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        ly = _MT + 16 * k
        parts.append(f'<line x1="{_W - _MR - 120}" y1="{ly}" x2="{_W - _MR - 95}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_W - _MR - 90}" y="{ly + 4}" font-size="11">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
