"""Deterministic SVG views of slices, their star images and grids.

Exact points are mapped to floats through ``to_float`` and a fixed
orthonormal frame of the slice plane.  Nothing computed here flows back into
exact code paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .geometry import FIVEFOLD_AXIS, Point3, embed
from .modelset import Slice
from .qtau import QTau, format_qtau
from .tomography import Grid
from .window import Window

KINDS = ("slice-physical", "slice-star-with-window", "grid-star-with-window")


class PlotError(ValueError):
    pass


def _frame(normal: Point3) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Orthonormal in-plane frame (e1, e2) with e1 = (0, 1, 0) and e2 = normal x e1."""
    n = normal.to_float()
    e1 = (0.0, 1.0, 0.0)
    e2 = (n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0])
    r = math.sqrt(sum(c * c for c in e2))
    return e1, tuple(c / r for c in e2)


def _project(p: Point3, frame) -> tuple[float, float]:
    f = p.to_float()
    e1, e2 = frame
    return (sum(a * b for a, b in zip(f, e1)), sum(a * b for a, b in zip(f, e2)))


@dataclass
class PlotGeometry:
    """Float picture: plain markers, highlighted markers and an optional outline."""

    markers: list[tuple[float, float]] = field(default_factory=list)
    highlights: list[tuple[float, float]] = field(default_factory=list)
    outline: Optional[list[tuple[float, float]]] = None
    title: str = ""


@dataclass
class PlotSpec:
    what: str
    slice: Optional[Slice] = None
    window: Optional[Window] = None
    grid: Optional[Grid] = None
    height: Optional[QTau] = None
    point_radius: float = 0.06
    outline: bool = True

    def __post_init__(self):
        if self.what not in KINDS:
            raise PlotError(f"unknown plot kind {self.what!r}")


def _star_outline(window: Window, height_star: QTau, frame) -> Optional[list[tuple[float, float]]]:
    n_star = FIVEFOLD_AXIS.star()
    if window.plane is not None:
        normal, offset = window.plane
        if not normal.cross(n_star).is_zero:
            raise PlotError("window plane is not parallel to the slice plane")
        k = next(a / b for a, b in zip(normal, n_star) if not b.is_zero)
        if offset + normal.dot(window.translate) != k * height_star:
            raise PlotError("window plane does not match the slice height")
        return [_project(v, frame) for v in window.translated_vertices()]
    sec = window.cross_section(n_star, height_star - n_star.dot(window.translate))
    if sec is None:
        return None
    return [_project(v + window.translate, frame) for v in sec.vertices]


def geometry(spec: PlotSpec) -> PlotGeometry:
    if spec.what == "slice-physical":
        if spec.slice is None:
            raise PlotError("slice-physical needs a slice")
        frame = _frame(FIVEFOLD_AXIS)
        pts = [_project(embed(p), frame) for p in spec.slice.points]
        return PlotGeometry(markers=pts, title=f"slice h={format_qtau(spec.slice.height)}")

    if spec.window is None:
        raise PlotError(f"{spec.what} needs a window")
    n_star = FIVEFOLD_AXIS.star()
    frame = _frame(n_star)

    if spec.what == "slice-star-with-window":
        if spec.slice is None:
            raise PlotError("slice-star-with-window needs a slice")
        h = spec.slice.height
        pts = [_project(embed(p).star(), frame) for p in spec.slice.points]
        outline = _star_outline(spec.window, h.galois(), frame) if spec.outline else None
        return PlotGeometry(markers=pts, outline=outline, title=f"star slice h={format_qtau(h)}")

    if spec.grid is None:
        raise PlotError("grid-star-with-window needs a grid")
    g = spec.grid
    h = spec.height
    if h is None:
        if spec.slice is not None:
            h = spec.slice.height
        elif g.points:
            h = g.points[0].dot(FIVEFOLD_AXIS)
        else:
            raise PlotError("cannot infer the plane of an empty grid")
    for p in g.points:
        if p.dot(FIVEFOLD_AXIS) != h:
            raise PlotError("grid points are not in the slice plane")
    chosen = set()
    if spec.slice is not None:
        if spec.slice.height != h:
            raise PlotError("slice and grid planes differ")
        chosen = {embed(p) for p in spec.slice.points}
    plain = [_project(p.star(), frame) for p in g.points if p not in chosen]
    high = [_project(p.star(), frame) for p in g.points if p in chosen]
    outline = _star_outline(spec.window, h.galois(), frame) if spec.outline else None
    return PlotGeometry(markers=plain, highlights=high, outline=outline, title=f"star grid h={format_qtau(h)}")


def _fmt(x: float) -> str:
    s = f"{x:.4f}"
    return "0.0000" if s == "-0.0000" else s


def render_svg(geo: PlotGeometry, point_radius: float = 0.06, scale: float = 80.0) -> str:
    allpts = geo.markers + geo.highlights + (geo.outline or [])
    if allpts:
        xs = [p[0] for p in allpts]
        ys = [p[1] for p in allpts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0 = x1 = y0 = y1 = 0.0
    pad = 0.5
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    width, height = (x1 - x0) * scale, (y1 - y0) * scale

    def tx(p):
        # flip y so that the second frame axis points up
        return _fmt((p[0] - x0) * scale), _fmt((y1 - p[1]) * scale)

    r = _fmt(point_radius * scale)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f"<title>{geo.title}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if geo.outline:
        pts = " ".join(",".join(tx(p)) for p in geo.outline)
        out.append(f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    for p in geo.markers:
        cx, cy = tx(p)
        fill = "white" if geo.highlights else "black"
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="{fill}" stroke="black"/>')
    for p in geo.highlights:
        cx, cy = tx(p)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="black" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot(spec: PlotSpec) -> str:
    return render_svg(geometry(spec), spec.point_radius)


def inside_polygon(p: tuple[float, float], poly: Sequence[tuple[float, float]], margin: float = 0.0) -> bool:
    """Float test: ``p`` lies at distance > margin inside a convex polygon (either orientation)."""
    k = len(poly)
    area = sum(poly[i][0] * poly[(i + 1) % k][1] - poly[(i + 1) % k][0] * poly[i][1] for i in range(k))
    sgn = 1.0 if area > 0 else -1.0
    for i in range(k):
        a, b = poly[i], poly[(i + 1) % k]
        ex, ey = b[0] - a[0], b[1] - a[1]
        d = sgn * (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / math.hypot(ex, ey)
        if d <= margin:
            return False
    return True
