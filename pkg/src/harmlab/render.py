"""Polyline images of the polar grid under a map, written out as SVG."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadParam, EmptyInput
from .geometry import TWO_PI
from .maps import HarmonicMap
from .zeros import polyline_self_intersects

GRID_COLOR = "#c8c8c8"
BOUNDARY_COLOR = "#d62728"


@dataclass(frozen=True)
class RenderSpec:
    n_radii: int = 8
    n_rays: int = 16
    r_max: float = 0.999
    samples_per_curve: int = 256
    grid_width: float = 0.004
    boundary_width: float = 0.008
    grid_color: str = GRID_COLOR
    boundary_color: str = BOUNDARY_COLOR

    def __post_init__(self):
        if self.n_radii < 2 or self.n_rays < 2:
            raise BadParam("n_radii and n_rays must be >= 2")
        if not 0 < self.r_max < 1:
            raise BadParam("r_max must lie in (0, 1)")
        if self.samples_per_curve < 64:
            raise BadParam("samples_per_curve must be >= 64")


@dataclass
class PolylineSet:
    grid: list = field(default_factory=list)
    boundary: np.ndarray | None = None

    def all(self) -> list:
        out = list(self.grid)
        if self.boundary is not None:
            out.append(self.boundary)
        return out

    def __len__(self):
        return len(self.all())


def _closed(p: np.ndarray) -> np.ndarray:
    return np.append(p, p[0])


def _evaluator(map_or_fn, of: str):
    if isinstance(map_or_fn, HarmonicMap):
        if of == "f":
            return map_or_fn.f
        if of == "omega":
            return map_or_fn.omega
        raise BadParam(f"unknown image kind {of!r}")
    if callable(map_or_fn):
        return map_or_fn
    raise BadParam("expected a HarmonicMap or a callable")


def image_grid(map_or_fn, spec: RenderSpec = RenderSpec(), of: str = "f") -> PolylineSet:
    """Images of n_radii circles, n_rays rays and the circle |z| = r_max."""
    fn = _evaluator(map_or_fn, of)
    n = spec.samples_per_curve
    t = TWO_PI * np.arange(n) / n
    unit = np.exp(1j * t)
    grid = []
    for j in range(1, spec.n_radii + 1):
        r = spec.r_max * j / (spec.n_radii + 1)
        grid.append(_closed(np.asarray(fn(r * unit), dtype=complex)))
    s = spec.r_max * np.arange(n) / (n - 1)
    for k in range(spec.n_rays):
        ray = s * np.exp(1j * TWO_PI * k / spec.n_rays)
        grid.append(np.asarray(fn(ray), dtype=complex))
    boundary = _closed(np.asarray(fn(spec.r_max * unit), dtype=complex))
    return PolylineSet(grid=grid, boundary=boundary)


def _fmt(x: float) -> str:
    s = format(float(x), ".9g")
    return "0" if s == "-0" else s


def _path_d(p: np.ndarray) -> str:
    pts = [f"{_fmt(z.real)},{_fmt(-z.imag)}" for z in p]
    return "M" + " L".join(pts)


def view_box(polylines) -> tuple:
    pts = np.concatenate([np.asarray(p, dtype=complex) for p in polylines])
    x0, x1 = float(pts.real.min()), float(pts.real.max())
    y0, y1 = float(-pts.imag.max()), float(-pts.imag.min())
    size = max(x1 - x0, y1 - y0)
    pad = 0.05 * size / 2 if size > 0 else 0.05
    return x0 - pad, y0 - pad, x1 - x0 + 2 * pad, y1 - y0 + 2 * pad


def render_svg(polylines, out_path, spec: RenderSpec = RenderSpec()) -> Path:
    """Write an SVG with one path per polyline.

    Accepts a PolylineSet (grid in grey, boundary in red) or a plain list,
    whose entries are all drawn as boundary curves. Output is byte-stable.
    """
    if isinstance(polylines, PolylineSet):
        grid, boundary = polylines.grid, ([] if polylines.boundary is None else [polylines.boundary])
    else:
        grid, boundary = [], list(polylines)
    grid = [np.asarray(p, dtype=complex) for p in grid if len(p)]
    boundary = [np.asarray(p, dtype=complex) for p in boundary if len(p)]
    if not grid and not boundary:
        raise EmptyInput("nothing to render")
    vb = view_box(grid + boundary)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{" ".join(_fmt(v) for v in vb)}">',
    ]
    scale = max(vb[2], vb[3]) / 2
    for p in grid:
        lines.append(f'<path d="{_path_d(p)}" fill="none" stroke="{spec.grid_color}" '
                     f'stroke-width="{_fmt(spec.grid_width * scale)}"/>')
    for p in boundary:
        lines.append(f'<path d="{_path_d(p)}" fill="none" stroke="{spec.boundary_color}" '
                     f'stroke-width="{_fmt(spec.boundary_width * scale)}"/>')
    lines.append("</svg>")
    out = Path(out_path)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out


# geometric checks on rendered outlines

def _edges(p: np.ndarray):
    p = np.asarray(p, dtype=complex)
    if p[0] == p[-1]:
        p = p[:-1]
    e = np.roll(p, -1) - p
    keep = np.abs(e) > 0
    return e[keep]


def straight_sides(p: np.ndarray, tol_deg: float = 2.0, min_frac: float = 0.05) -> list:
    """Maximal runs of edges whose direction stays within tol_deg of the run's
    first edge; runs shorter than min_frac of the perimeter are dropped.

    Returns (direction_rad, length) per side, in traversal order.
    """
    e = _edges(p)
    if e.size < 3:
        return []
    turn = np.abs(np.angle(e / np.roll(e, 1)))
    e = np.roll(e, -int(np.argmax(turn)))
    ang = np.angle(e)
    tol = math.radians(tol_deg)
    perimeter = float(np.sum(np.abs(e)))
    sides, start, length = [], 0, 0.0
    for i in range(e.size):
        d = abs(math.remainder(ang[i] - ang[start], TWO_PI))
        if d > tol:
            sides.append((float(ang[start]), length))
            start, length = i, 0.0
        length += abs(e[i])
    sides.append((float(ang[start]), length))
    sides = [s for s in sides if s[1] >= min_frac * perimeter]
    # a flat stretch split by one noisy edge is still one side
    merged = []
    for d, ln in sides:
        if merged and abs(math.remainder(d - merged[-1][0], TWO_PI)) <= tol:
            merged[-1] = (merged[-1][0], merged[-1][1] + ln)
        else:
            merged.append((d, ln))
    if len(merged) > 1 and abs(math.remainder(merged[0][0] - merged[-1][0], TWO_PI)) <= tol:
        merged[0] = (merged[-1][0], merged[0][1] + merged[-1][1])
        merged.pop()
    return merged


def count_straight_sides(p: np.ndarray, tol_deg: float = 2.0, min_frac: float = 0.05) -> int:
    return len(straight_sides(p, tol_deg, min_frac))


def is_quadrilateral(p: np.ndarray, tol_deg: float = 2.0, coverage: float = 0.9) -> bool:
    """Convex outline made of exactly 4 straight sides covering most of the perimeter."""
    sides = straight_sides(p, tol_deg)
    perimeter = float(np.sum(np.abs(_edges(p))))
    return (len(sides) == 4 and sum(ln for _, ln in sides) >= coverage * perimeter
            and is_convex(p))


def is_convex(p: np.ndarray, rel_tol: float = 1e-9) -> bool:
    """All turns have one sign (tiny turns ignored) and the total turning is one revolution."""
    e = _edges(p)
    if e.size < 3:
        return False
    cross = (np.conj(e) * np.roll(e, -1)).imag
    scale = float(np.max(np.abs(e))) ** 2
    big = cross[np.abs(cross) > rel_tol * scale]
    if big.size == 0:
        return False
    if not (np.all(big > 0) or np.all(big < 0)):
        return False
    total = float(np.sum(np.angle(np.roll(e, -1) / e)))
    return abs(abs(total) - TWO_PI) < 1e-6


def is_simple(p: np.ndarray) -> bool:
    return not polyline_self_intersects(np.asarray(p, dtype=complex), closed=True)
