"""Minimal deterministic SVG line charts.

Cosmetic companions to the CSV tables: no timestamps, no random ids, byte
output depends only on the data, so charts can be diffed like the tables.
Non-finite points are dropped from their series.
"""

from __future__ import annotations

import math

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_WIDTH, _HEIGHT = 720.0, 480.0
_MARGIN_LEFT, _MARGIN_RIGHT = 80.0, 24.0
_MARGIN_TOP, _MARGIN_BOTTOM = 40.0, 56.0


def _transform(value: float, lo: float, hi: float, log: bool) -> float:
    if log:
        value, lo, hi = math.log10(value), math.log10(lo), math.log10(hi)
    if hi == lo:
        return 0.5
    return (value - lo) / (hi - lo)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _tick_label(value: float) -> str:
    return f"{value:.6g}"


def line_chart(
    series: list[tuple[str, list[tuple[float, float]]]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    log_x: bool = False,
    log_y: bool = False,
) -> str:
    points_by_name = []
    for name, points in series:
        kept = [
            (x, y)
            for x, y in points
            if math.isfinite(x) and math.isfinite(y)
            and (not log_x or x > 0) and (not log_y or y > 0)
        ]
        if kept:
            points_by_name.append((name, kept))
    if not points_by_name:
        raise ValueError("no finite points to plot")

    xs = [x for _, pts in points_by_name for x, _ in pts]
    ys = [y for _, pts in points_by_name for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x: float) -> float:
        return _MARGIN_LEFT + _transform(x, x_lo, x_hi, log_x) * plot_w

    def py(y: float) -> float:
        return _MARGIN_TOP + (1.0 - _transform(y, y_lo, y_hi, log_y)) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(_MARGIN_TOP)}" '
        f'width="{_fmt(plot_w)}" height="{_fmt(plot_h)}" '
        'fill="none" stroke="#444444" stroke-width="1"/>',
    ]
    if title:
        out.append(
            f'<text x="{_fmt(_WIDTH / 2)}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{title}</text>'
        )
    if x_label:
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT + plot_w / 2)}" y="{_fmt(_HEIGHT - 14)}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>'
        )
    if y_label:
        cx, cy = 20.0, _MARGIN_TOP + plot_h / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{y_label}</text>'
        )

    # Corner tick labels only; this is a sketch, not a publication figure.
    out.append(
        f'<text x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(_HEIGHT - 36)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{_tick_label(x_lo)}</text>'
    )
    out.append(
        f'<text x="{_fmt(_MARGIN_LEFT + plot_w)}" y="{_fmt(_HEIGHT - 36)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="11">{_tick_label(x_hi)}</text>'
    )
    out.append(
        f'<text x="{_fmt(_MARGIN_LEFT - 6)}" y="{_fmt(_MARGIN_TOP + plot_h)}" '
        f'text-anchor="end" font-family="sans-serif" font-size="11">{_tick_label(y_lo)}</text>'
    )
    out.append(
        f'<text x="{_fmt(_MARGIN_LEFT - 6)}" y="{_fmt(_MARGIN_TOP + 10)}" '
        f'text-anchor="end" font-family="sans-serif" font-size="11">{_tick_label(y_hi)}</text>'
    )

    for i, (name, pts) in enumerate(points_by_name):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MARGIN_TOP + 16 + 16 * i
        lx = _MARGIN_LEFT + 12
        out.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 4)}" x2="{_fmt(lx + 18)}" '
            f'y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{_fmt(lx + 24)}" y="{_fmt(ly)}" font-family="sans-serif" '
            f'font-size="12">{name}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
