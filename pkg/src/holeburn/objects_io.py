"""Transverse grids and their file formats.

IntensityGrid is the common currency of the simulator: object-beam
intensities in saturation units, mask and filter transmittances in [0, 1],
and detector frames all live on the same kind of 2D grid with a pixel pitch.
This module also handles mask ingestion (binary PGM / grayscale PNG),
analytic beam profiles, neutral-density composites and grid export.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

DEFAULT_CANVAS = 256          # px
DEFAULT_PIXEL_PITCH = 50e-6   # m


@dataclass(frozen=True)
class IntensityGrid:
    """2D grid of finite, non-negative values with a pixel pitch in meters."""

    values: np.ndarray
    pixel_pitch: float = DEFAULT_PIXEL_PITCH

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("grid values must be a non-empty 2D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid values must be finite")
        if np.any(arr < 0):
            raise ValueError("grid values must be >= 0")
        if not (math.isfinite(self.pixel_pitch) and self.pixel_pitch > 0):
            raise ValueError(f"pixel_pitch must be finite and > 0, got {self.pixel_pitch!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class Rect:
    """Axis-aligned pixel rectangle, half-open: [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ValueError(f"degenerate rectangle {self}")


@dataclass(frozen=True)
class NDLayout:
    """Two overlapping rectangular neutral-density filters.

    Densities add where the filters stack, so the frame splits into four
    regions of ND {0, nd_a, nd_b, nd_a + nd_b}.
    """

    nd_a: float
    nd_b: float
    rect_a: Rect
    rect_b: Rect

    def __post_init__(self):
        if self.nd_a < 0 or self.nd_b < 0:
            raise ValueError("neutral densities must be >= 0")


def load_mask(path, pixel_pitch: float = DEFAULT_PIXEL_PITCH) -> IntensityGrid:
    """Read an 8- or 16-bit single-channel PGM (P5) or PNG as linear transmittance.

    Sample values map linearly onto [0, 1]; no gamma is applied.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".pnm"):
        raw, maxval = _read_pgm(path)
    elif suffix == ".png":
        raw, maxval = _read_png(path)
    else:
        raise ValueError(f"unsupported mask format {path.name!r}: expected .pgm or .png")
    if raw.size == 0:
        raise ValueError(f"zero-size image: {path}")
    return IntensityGrid(raw.astype(float) / float(maxval), pixel_pitch)


def _read_pgm(path: Path):
    data = path.read_bytes()
    if data[:2] != b"P5":
        raise ValueError(f"unsupported PGM flavor in {path}: only binary P5 is handled")
    tokens, i = [], 2
    while len(tokens) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        if i == j:
            raise ValueError(f"truncated PGM header in {path}")
        try:
            tokens.append(int(data[i:j]))
        except ValueError:
            raise ValueError(f"bad PGM header token {data[i:j]!r} in {path}") from None
        i = j
    i += 1  # exactly one whitespace byte separates maxval from pixel data
    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise ValueError(f"zero-size image: {path}")
    if not 0 < maxval < 65536:
        raise ValueError(f"bad PGM maxval {maxval} in {path}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    raw = np.frombuffer(data, dtype=dtype, count=-1, offset=i)
    if raw.size < count:
        raise ValueError(f"truncated PGM pixel data in {path}")
    return raw[:count].reshape(height, width), maxval


def _read_png(path: Path):
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode == "L":
                maxval = 255
            elif mode == "1":
                maxval = 1
            elif mode in ("I", "I;16", "I;16B", "I;16L", "I;16N"):
                maxval = 65535
            else:
                raise ValueError(
                    f"unsupported PNG mode {mode!r} in {path}: need single-channel grayscale"
                )
            raw = np.asarray(im, dtype=np.int64)
    except UnidentifiedImageError:
        raise ValueError(f"unsupported mask format: {path} is not a readable PNG") from None
    return raw, maxval


def uniform_profile(width: int, height: int, pitch: float, level: float) -> IntensityGrid:
    """Flat grid at a constant level."""
    return IntensityGrid(np.full((height, width), float(level)), pitch)


def gaussian_profile(width: int, height: int, pitch: float, waist: float,
                     peak_s: float) -> IntensityGrid:
    """Centered Gaussian beam: peak_s on axis, falling to peak_s/e^2 at r = waist."""
    if not waist > 0:
        raise ValueError(f"waist must be > 0, got {waist!r}")
    if peak_s < 0:
        raise ValueError(f"peak_s must be >= 0, got {peak_s!r}")
    x = (np.arange(width) - (width - 1) / 2.0) * pitch
    y = (np.arange(height) - (height - 1) / 2.0) * pitch
    r2 = x[None, :] ** 2 + y[:, None] ** 2
    return IntensityGrid(peak_s * np.exp(-2.0 * r2 / (waist * waist)), pitch)


def apply_mask(beam: IntensityGrid, mask: IntensityGrid) -> IntensityGrid:
    """Attenuate a beam pixelwise by a mask or filter transmittance grid."""
    if beam.shape != mask.shape:
        raise ValueError(f"dimension mismatch: beam {beam.shape} vs mask {mask.shape}")
    return IntensityGrid(beam.values * mask.values, beam.pixel_pitch)


def nd_composite(layout: NDLayout, width: int, height: int,
                 pitch: float = DEFAULT_PIXEL_PITCH) -> IntensityGrid:
    """Transmittance grid 10^-ND(x,y) of two overlapping rectangular ND filters."""
    for name, rect in (("rect_a", layout.rect_a), ("rect_b", layout.rect_b)):
        if rect.x0 < 0 or rect.y0 < 0 or rect.x1 > width or rect.y1 > height:
            raise ValueError(f"{name} {rect} extends outside the {width}x{height} frame")
    density = np.zeros((height, width))
    density[layout.rect_a.y0:layout.rect_a.y1, layout.rect_a.x0:layout.rect_a.x1] += layout.nd_a
    density[layout.rect_b.y0:layout.rect_b.y1, layout.rect_b.x0:layout.rect_b.x1] += layout.nd_b
    return IntensityGrid(10.0 ** -density, pitch)


def export_grid(grid, path, fmt: str, metadata: dict | None = None) -> None:
    """Write a grid to disk.

    fmt 'csv': row-major decimal values, comma separated, LF endings, full
    float64 round-trip precision.  fmt 'pgm16': values min-max normalized to
    0..65535 in a binary P5 file, plus a JSON sidecar at <path>.json holding
    min, max and any extra metadata.  A constant grid exports as all zeros
    with min == max in the sidecar.
    """
    values = np.asarray(getattr(grid, "values", grid), dtype=float)
    if values.ndim != 2 or values.size == 0:
        raise ValueError("can only export a non-empty 2D grid")
    path = Path(path)
    if fmt == "csv":
        body = "\n".join(",".join(repr(float(v)) for v in row) for row in values)
        _atomic_write(path, (body + "\n").encode("ascii"))
    elif fmt == "pgm16":
        lo, hi = float(values.min()), float(values.max())
        if hi > lo:
            scaled = np.round((values - lo) / (hi - lo) * 65535.0).astype(">u2")
        else:
            scaled = np.zeros(values.shape, dtype=">u2")
        header = f"P5\n{values.shape[1]} {values.shape[0]}\n65535\n".encode("ascii")
        _atomic_write(path, header + scaled.tobytes())
        sidecar = {"min": lo, "max": hi}
        if metadata:
            sidecar.update(metadata)
        payload = json.dumps(sidecar, sort_keys=True, indent=2) + "\n"
        _atomic_write(path.with_name(path.name + ".json"), payload.encode("ascii"))
    else:
        raise ValueError(f"unknown export format {fmt!r}: expected 'csv' or 'pgm16'")


def load_grid_csv(path) -> np.ndarray:
    """Read back an export_grid CSV; bit-exact inverse of the csv exporter."""
    rows = [
        [float(tok) for tok in line.split(",")]
        for line in Path(path).read_text(encoding="ascii").splitlines()
        if line
    ]
    if not rows:
        raise ValueError(f"empty grid CSV: {path}")
    return np.array(rows, dtype=float)


def _atomic_write(path: Path, payload: bytes) -> None:
    # stage next to the target so a failed write never leaves a partial file
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    tmp.replace(path)
