"""Synthetic letter transparencies for the three-beam imaging demo.

Binary masks (1 = transparent stroke, 0 = opaque) drawn directly on the
pixel grid.  The three letters interleave across the canvas but their
strokes never touch: a hole burned 40 MHz away still bleaches a few percent
of a neighboring tomogram through its Lorentzian tail, so the artwork keeps
the mask-level cross-correlation near zero to leave room for that physical
leakage.
"""

from __future__ import annotations

import numpy as np

from .objects_io import DEFAULT_PIXEL_PITCH, IntensityGrid

LETTERS = ("C", "A", "T")


def _disk(xx, yy, cx, cy, radius):
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius


def _segment(xx, yy, x0, y0, x1, y1, half):
    dx, dy = x1 - x0, y1 - y0
    t = np.clip(((xx - x0) * dx + (yy - y0) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
    return (xx - (x0 + t * dx)) ** 2 + (yy - (y0 + t * dy)) ** 2 <= half * half


def letter_mask(letter: str, size: int = 128, stroke: float | None = None,
                pixel_pitch: float = DEFAULT_PIXEL_PITCH) -> IntensityGrid:
    """Square binary mask carrying a capital C, A or T."""
    letter = letter.upper()
    if letter not in LETTERS:
        raise ValueError(f"no artwork for letter {letter!r}: choose one of {LETTERS}")
    if size < 16:
        raise ValueError("letter masks need size >= 16 px")
    if stroke is None:
        stroke = max(3.0, size * 6.0 / 128.0)
    half = stroke / 2.0
    yy, xx = np.mgrid[0:size, 0:size].astype(float)
    on = np.zeros((size, size), dtype=bool)

    if letter == "C":
        cx, cy = 0.24 * size, 0.50 * size
        radius = 0.15 * size
        rr = np.hypot(xx - cx, yy - cy)
        ang = np.degrees(np.arctan2(cy - yy, xx - cx)) % 360.0
        on |= (np.abs(rr - radius) <= half) & (ang >= 40.0) & (ang <= 320.0)
        for end in (40.0, 320.0):
            ex = cx + radius * np.cos(np.radians(end))
            ey = cy - radius * np.sin(np.radians(end))
            on |= _disk(xx, yy, ex, ey, half)
    elif letter == "A":
        apex = (0.50 * size, 0.15 * size)
        left = (0.40 * size, 0.85 * size)
        right = (0.60 * size, 0.85 * size)
        on |= _segment(xx, yy, *apex, *left, half)
        on |= _segment(xx, yy, *apex, *right, half)
        bar_y = 0.60 * size
        frac = (bar_y - apex[1]) / (left[1] - apex[1])
        bar_left = apex[0] + frac * (left[0] - apex[0])
        bar_right = apex[0] + frac * (right[0] - apex[0])
        on |= _segment(xx, yy, bar_left, bar_y, bar_right, bar_y, half)
    else:  # T
        on |= _segment(xx, yy, 0.62 * size, 0.15 * size, 0.86 * size, 0.15 * size, half)
        on |= _segment(xx, yy, 0.74 * size, 0.15 * size, 0.74 * size, 0.78 * size, half)

    return IntensityGrid(on.astype(float), pixel_pitch)
