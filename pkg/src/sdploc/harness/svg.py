"""Static SVG scatter plots of one localization trial.

Green circles mark true blind-node positions, red stars the estimates, blue
diamonds the anchors, and a blue segment joins each truth-estimate pair so
segment length equals that node's position error. All marker and segment
coordinates are in meters inside a flipped-y group, which lets tests (and
curious readers) recover the errors by parsing the file.
"""

from __future__ import annotations

import math

import numpy as np

_SCALE = 20.0   # px per meter
_MARGIN = 40.0  # px


def _star_points(cx: float, cy: float, r: float, n: int = 5) -> str:
    pts = []
    for i in range(2 * n):
        rad = r if i % 2 == 0 else 0.4 * r
        ang = math.pi / 2 + i * math.pi / n
        pts.append(f"{cx + rad * math.cos(ang):.4f},{cy + rad * math.sin(ang):.4f}")
    return " ".join(pts)


def _diamond_points(cx: float, cy: float, r: float) -> str:
    return (f"{cx:.4f},{cy - r:.4f} {cx + r:.4f},{cy:.4f} "
            f"{cx:.4f},{cy + r:.4f} {cx - r:.4f},{cy:.4f}")


def render_scatter(trial) -> str:
    """SVG document for a TrialResult (or anything with truth/estimates/anchors/box)."""
    return render_positions(trial.truth, trial.estimates, trial.anchors,
                            trial.box)


def render_positions(truth: np.ndarray, estimates: np.ndarray,
                     anchors: np.ndarray,
                     box: tuple[float, float]) -> str:
    w, h = box
    width_px = w * _SCALE + 2 * _MARGIN
    height_px = h * _SCALE + 2 * _MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px:.0f}" '
        f'height="{height_px:.0f}" viewBox="0 0 {width_px:.0f} {height_px:.0f}">',
        f'<g transform="translate({_MARGIN},{h * _SCALE + _MARGIN}) '
        f'scale({_SCALE},-{_SCALE})">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white" '
        f'stroke="black" stroke-width="0.05"/>',
    ]
    for (tx, ty), (ex, ey) in zip(truth, estimates):
        if np.isfinite([ex, ey]).all():
            out.append(f'<line class="error" x1="{tx:.6f}" y1="{ty:.6f}" '
                       f'x2="{ex:.6f}" y2="{ey:.6f}" stroke="blue" '
                       f'stroke-width="0.06"/>')
    for ax, ay in anchors:
        out.append(f'<polygon class="anchor" points="{_diamond_points(ax, ay, 0.5)}" '
                   f'fill="blue"/>')
    for tx, ty in truth:
        out.append(f'<circle class="truth" cx="{tx:.6f}" cy="{ty:.6f}" r="0.35" '
                   f'fill="none" stroke="green" stroke-width="0.1"/>')
    for ex, ey in estimates:
        if np.isfinite([ex, ey]).all():
            out.append(f'<polygon class="estimate" points="{_star_points(ex, ey, 0.45)}" '
                       f'fill="red"/>')
    out.append("</g>")
    # axis labels in meters
    for t in range(0, int(w) + 1, 5):
        out.append(f'<text x="{_MARGIN + t * _SCALE:.0f}" '
                   f'y="{height_px - _MARGIN / 3:.0f}" font-size="12" '
                   f'text-anchor="middle">{t}</text>')
    for t in range(0, int(h) + 1, 5):
        out.append(f'<text x="{_MARGIN / 3:.0f}" '
                   f'y="{height_px - _MARGIN - t * _SCALE:.0f}" font-size="12" '
                   f'text-anchor="middle">{t}</text>')
    out.append("</svg>")
    return "\n".join(out)
