from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

from PIL import Image, ImageDraw

from .region import RegionCurves

WIDTH, HEIGHT = 640, 480
MARGIN = 50
BACKGROUND = (255, 255, 255)
AXIS = (0, 0, 0)
COLORS = {
    "cutset": (120, 120, 120),
    "timing": (200, 40, 40),
    "achievable": (30, 90, 200),
}


def _scaler(x_max: float, y_max: float):
    sx = (WIDTH - 2 * MARGIN) / x_max
    sy = (HEIGHT - 2 * MARGIN) / y_max

    def to_px(point: Sequence[float]) -> tuple[float, float]:
        return MARGIN + point[0] * sx, HEIGHT - MARGIN - point[1] * sy

    return to_px


def _star(center: tuple[float, float], r: float = 8.0) -> list[tuple[float, float]]:
    cx, cy = center
    pts = []
    for k in range(10):
        radius = r if k % 2 == 0 else r * 0.45
        angle = -math.pi / 2 + k * math.pi / 5
        pts.append((cx + radius * math.cos(angle), cy + radius * math.sin(angle)))
    return pts


def render_region(curves: RegionCurves) -> Image.Image:
    """Draw the three two-source regions (R_0 right, R_1 up) with the star and circle marks."""
    x_max = max(p[0] for p in curves.cutset) * 1.1
    y_max = max(p[1] for p in curves.cutset) * 1.1
    to_px = _scaler(x_max, y_max)

    img = Image.new("RGB", (WIDTH, HEIGHT), BACKGROUND)
    draw = ImageDraw.Draw(img)

    origin = to_px((0.0, 0.0))
    draw.line([origin, to_px((x_max, 0.0))], fill=AXIS, width=1)
    draw.line([origin, to_px((0.0, y_max))], fill=AXIS, width=1)
    draw.text((WIDTH - MARGIN, HEIGHT - MARGIN + 8), "R0", fill=AXIS)
    draw.text((MARGIN - 30, MARGIN - 20), "R1", fill=AXIS)
    for tick in range(int(x_max * 2) + 1):
        x, y = to_px((tick / 2, 0.0))
        draw.line([(x, y), (x, y + 4)], fill=AXIS)
        draw.text((x - 8, y + 6), f"{tick / 2:.1f}", fill=AXIS)
    for tick in range(int(y_max * 2) + 1):
        x, y = to_px((0.0, tick / 2))
        draw.line([(x - 4, y), (x, y)], fill=AXIS)
        draw.text((x - 30, y - 6), f"{tick / 2:.1f}", fill=AXIS)

    # the cut-set curve closes onto both axes
    draw.line([to_px(p) for p in ((0.0, 0.0),) + curves.cutset], fill=COLORS["cutset"], width=2)
    draw.line([to_px(p) for p in curves.timing], fill=COLORS["timing"], width=2)
    draw.line([to_px(p) for p in curves.achievable], fill=COLORS["achievable"], width=3)

    draw.polygon(_star(to_px(curves.star)), fill=COLORS["achievable"])
    cx, cy = to_px(curves.circle)
    draw.ellipse([cx - 6, cy - 6, cx + 6, cy + 6], outline=COLORS["achievable"], width=2)
    return img


def save_region_png(curves: RegionCurves, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    render_region(curves).save(path, format="PNG", optimize=True)
