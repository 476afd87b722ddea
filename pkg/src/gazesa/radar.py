"""Two-trial radar chart as a standalone SVG document."""

from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence
from xml.sax.saxutils import escape

COLORS = ("#d62728", "#1f77b4")


def normalize(columns: Mapping[str, Sequence[Optional[float]]]) -> dict[str, list[float]]:
    """Min-max scale each column to [0, 1]; missing values and constant
    columns map to 0."""
    out = {}
    for name, col in columns.items():
        present = [v for v in col if v is not None]
        lo, hi = (min(present), max(present)) if present else (0.0, 0.0)
        span = hi - lo
        out[name] = [((v - lo) / span if span > 0 else 0.0) if v is not None else 0.0 for v in col]
    return out


def render_radar(
    axes: Sequence[str],
    series: Sequence[tuple[str, Sequence[float]]],
    centre: Optional[Sequence[float]] = None,
    size: int = 480,
) -> str:
    """Render one polygon per series over ``len(axes)`` spokes.

    Args:
        axes: spoke labels, clockwise from 12 o'clock.
        series: ``(label, values)`` pairs, values already scaled to [0, 1].
        centre: optional per-series value in [0, 1] drawn as a central circle
            (used for driving performance).
    """
    c = size / 2.0
    radius = size * 0.36
    k = len(axes)

    def point(i: int, r: float) -> tuple[float, float]:
        ang = -math.pi / 2 + 2 * math.pi * i / k
        return c + r * math.cos(ang), c + r * math.sin(ang)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for frac in (0.25, 0.5, 0.75, 1.0):
        out.append(
            f'<circle class="grid" cx="{c:.2f}" cy="{c:.2f}" r="{radius * frac:.2f}" '
            'fill="none" stroke="#cccccc" stroke-width="0.8"/>'
        )
    for i, name in enumerate(axes):
        x, y = point(i, radius)
        lx, ly = point(i, radius + 22)
        out.append(
            f'<line class="axis" x1="{c:.2f}" y1="{c:.2f}" x2="{x:.2f}" y2="{y:.2f}" '
            'stroke="#888888" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="11" font-family="sans-serif" '
            f'text-anchor="middle" dominant-baseline="middle">{escape(name)}</text>'
        )
    for j, (label, values) in enumerate(series):
        color = COLORS[j % len(COLORS)]
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in (point(i, radius * v) for i, v in enumerate(values)))
        out.append(
            f'<polygon points="{pts}" fill="{color}" fill-opacity="0.2" stroke="{color}" '
            f'stroke-width="2"><title>{escape(label)}</title></polygon>'
        )
        if centre is not None:
            out.append(
                f'<circle class="performance" cx="{c:.2f}" cy="{c:.2f}" r="{4 + 26 * centre[j]:.2f}" '
                f'fill="none" stroke="{color}" stroke-width="2" stroke-dasharray="4 2"/>'
            )
        out.append(
            f'<text x="12" y="{20 + 16 * j}" font-size="12" font-family="sans-serif" '
            f'fill="{color}">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
