"""Static SVG renderings for strengths bars, trait curves and heatmaps.

Deterministic string assembly, no plotting dependency. The charts mirror the
data files the command-line driver writes next to them.
"""

from __future__ import annotations

import numpy as np

from .trait_analysis import StrengthReport, TraitCurveSet

_PALETTE = (
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860",
    "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
)


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def _header(width: int, height: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def render_strength_bars(report: StrengthReport, width: int = 720) -> str:
    """Two panels of horizontal interval bars, strengths above weaknesses."""
    names = report.algorithm_names
    row_h = 18
    label_w = 190
    panel_gap = 40
    n = len(names)
    panel_h = row_h * n + 30
    height = 2 * panel_h + panel_gap + 20
    lo = min((iv[0] for group in report.strengths + report.weaknesses
              for iv in group), default=0.0)
    hi = max((iv[1] for group in report.strengths + report.weaknesses
              for iv in group), default=1.0)
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    plot_w = width - label_w - 20

    def x_pos(value: float) -> float:
        return label_w + (value - lo) / span * plot_w

    parts = _header(width, height)
    for panel, (title, groups, colour) in enumerate((
        ("strengths", report.strengths, "#2a7e43"),
        ("weaknesses", report.weaknesses, "#b03a3a"),
    )):
        y0 = 20 + panel * (panel_h + panel_gap)
        parts.append(
            f'<text x="{label_w}" y="{y0 - 6}" font-size="13" '
            f'font-family="sans-serif">{title} (eps={_fmt(report.epsilon)})</text>'
        )
        for j, name in enumerate(names):
            y = y0 + j * row_h
            parts.append(
                f'<text x="{label_w - 6}" y="{y + 12}" font-size="10" '
                f'text-anchor="end" font-family="sans-serif">{name}</text>'
            )
            parts.append(
                f'<line x1="{label_w}" y1="{y + 8}" x2="{width - 20}" '
                f'y2="{y + 8}" stroke="#eeeeee"/>'
            )
            for lo_iv, hi_iv in groups[j]:
                x1, x2 = x_pos(lo_iv), x_pos(hi_iv)
                parts.append(
                    f'<rect x="{_fmt(x1)}" y="{y + 3}" '
                    f'width="{_fmt(max(x2 - x1, 1.0))}" height="10" '
                    f'fill="{colour}"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts)


def render_trait_curves(curves: TraitCurveSet, width: int = 720,
                        height: int = 420) -> str:
    """Per-algorithm performance curves over the difficulty grid."""
    grid = curves.grid
    values = curves.curves
    lo_y, hi_y = float(values.min()), float(values.max())
    if hi_y <= lo_y:
        hi_y = lo_y + 1.0
    lo_x, hi_x = float(grid[0]), float(grid[-1])
    if hi_x <= lo_x:
        hi_x = lo_x + 1.0
    margin = 45

    def pt(x, y):
        px = margin + (x - lo_x) / (hi_x - lo_x) * (width - margin - 140)
        py = height - margin - (y - lo_y) / (hi_y - lo_y) * (height - 2 * margin)
        return f"{px:.2f},{py:.2f}"

    parts = _header(width, height)
    parts.append(
        f'<text x="{width // 2 - 60}" y="{height - 8}" font-size="12" '
        f'font-family="sans-serif">instance difficulty</text>'
    )
    for j, name in enumerate(curves.algorithm_names):
        colour = _PALETTE[j % len(_PALETTE)]
        path = " ".join(pt(x, y) for x, y in zip(grid, values[j]))
        parts.append(
            f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" '
            f'points="{path}"/>'
        )
        ly = 20 + j * 14
        parts.append(
            f'<rect x="{width - 130}" y="{ly - 8}" width="10" height="10" '
            f'fill="{colour}"/>'
        )
        parts.append(
            f'<text x="{width - 116}" y="{ly}" font-size="9" '
            f'font-family="sans-serif">{name[:22]}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def render_heatmap(density: np.ndarray, z_grid, theta_grid, title: str = "",
                   width: int = 520, height: int = 420) -> str:
    """Density surface as a grid of grey-to-blue cells (z up, trait right)."""
    density = np.asarray(density, dtype=float)
    rows, cols = density.shape
    top = float(density.max()) or 1.0
    margin = 40
    cell_w = (width - 2 * margin) / cols
    cell_h = (height - 2 * margin) / rows
    parts = _header(width, height)
    if title:
        parts.append(
            f'<text x="{margin}" y="16" font-size="13" '
            f'font-family="sans-serif">{title}</text>'
        )
    for a in range(rows):
        for b in range(cols):
            frac = density[a, b] / top
            shade = int(round(255 * (1.0 - frac)))
            colour = f"rgb({shade},{shade},255)"
            x = margin + b * cell_w
            y = height - margin - (a + 1) * cell_h  # larger z towards the top
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_w + 0.5:.2f}" '
                f'height="{cell_h + 0.5:.2f}" fill="{colour}"/>'
            )
    parts.append(
        f'<text x="{width // 2 - 10}" y="{height - 10}" font-size="11" '
        f'font-family="sans-serif">trait</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)
