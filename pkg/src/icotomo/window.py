"""Convex polytope windows in internal space."""
from __future__ import annotations

import enum
from typing import Optional, Sequence

from .geometry import (
    ORIGIN,
    Face,
    Point3,
    affine_dimension,
    convex_hull_2d,
    convex_hull_3d,
)
from .qtau import TAU, TAU_CONJ, QTau


class Location(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class WindowError(ValueError):
    pass


class Window:
    """Convex polytope ``translate + conv(vertices)``.

    A 3D window is full-dimensional.  A 2D window is a convex polygon lying in
    the plane ``plane_normal . x = plane_offset`` (before translation); points
    off that plane classify as exterior.
    """

    def __init__(
        self,
        vertices: Sequence[Point3],
        translate: Point3 = ORIGIN,
        plane: Optional[tuple[Point3, QTau]] = None,
    ):
        self.translate = translate
        self.plane = plane
        if plane is None:
            hull = convex_hull_3d(vertices)
            if hull.dimension != 3:
                raise WindowError(f"window is degenerate (affine dimension {hull.dimension})")
            self.vertices = sorted(hull.vertices, key=Point3.sort_key)
            self.faces: list[Face] = hull.faces
        else:
            normal, offset = plane
            if normal.is_zero:
                raise WindowError("zero plane normal")
            for v in vertices:
                if normal.dot(v) != offset:
                    raise WindowError(f"vertex {v!r} is not on the window plane")
            if affine_dimension(vertices) != 2:
                raise WindowError("2d window has zero area")
            h = convex_hull_2d(vertices, normal)
            self.vertices = h.vertices
            self.faces = []
            k = len(self.vertices)
            for i in range(k):
                a, b = self.vertices[i], self.vertices[(i + 1) % k]
                # counter-clockwise about the normal: inward is normal x edge
                inward = normal.cross(b - a)
                self.faces.append(Face(inward, inward.dot(a), [a, b]))
        for f in self.faces:
            for v in self.vertices:
                if f.value(v).sign() > 0:
                    raise WindowError("vertex violates a face inequality")

    @property
    def dimension(self) -> int:
        return 3 if self.plane is None else 2

    def shifted(self, translate: Point3) -> "Window":
        w = Window.__new__(Window)
        w.vertices, w.faces, w.plane, w.translate = self.vertices, self.faces, self.plane, translate
        return w

    def translated_vertices(self) -> list[Point3]:
        return [v + self.translate for v in self.vertices]

    def classify(self, q: Point3) -> Location:
        return classify(self, q)

    def bounding_box(self) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
        """Float box around the translated window (bounds only, never a predicate)."""
        fs = [v.to_float() for v in self.translated_vertices()]
        lo = tuple(min(p[i] for p in fs) for i in range(3))
        hi = tuple(max(p[i] for p in fs) for i in range(3))
        return lo, hi

    def cross_section(self, normal: Point3, offset: QTau) -> Optional["Window"]:
        """Untranslated polygon ``W ∩ {x : normal . x = offset}`` as a 2D window.

        Returns None when the plane misses the interior of ``W``.
        """
        if self.plane is not None:
            raise WindowError("cross sections are taken of 3d windows")
        pts: list[Point3] = []
        vals = {v: normal.dot(v) - offset for v in self.vertices}
        for v, s in vals.items():
            if s.is_zero:
                pts.append(v)
        for f in self.faces:
            k = len(f.vertices)
            for i in range(k):
                a, b = f.vertices[i], f.vertices[(i + 1) % k]
                sa, sb = vals[a], vals[b]
                if sa.sign() * sb.sign() < 0:
                    t = sa / (sa - sb)
                    pts.append(a + (b - a).scale(t))
        pts = list(dict.fromkeys(pts))
        if affine_dimension(pts) != 2:
            return None
        return Window(pts, ORIGIN, (normal, offset))

    def __repr__(self) -> str:
        return f"Window(dim={self.dimension}, vertices={len(self.vertices)}, faces={len(self.faces)})"


def classify(w: Window, q: Point3) -> Location:
    """Exact location of ``q`` relative to ``w.translate + W``."""
    r = q - w.translate
    if w.plane is not None:
        normal, offset = w.plane
        if normal.dot(r) != offset:
            return Location.EXTERIOR
    on_boundary = False
    for f in w.faces:
        s = f.value(r).sign()
        if s > 0:
            return Location.EXTERIOR
        if s == 0:
            on_boundary = True
    return Location.BOUNDARY if on_boundary else Location.INTERIOR


def icosahedron_vertices() -> list[Point3]:
    """Cyclic coordinate permutations of (±tau', 0, ±1)."""
    out = []
    for sa in (1, -1):
        for sb in (1, -1):
            a, b = TAU_CONJ * sa, QTau(sb)
            out.append(Point3(a, 0, b))
            out.append(Point3(b, a, 0))
            out.append(Point3(0, b, a))
    return out


def window_icosahedron(translate: Point3 = ORIGIN) -> Window:
    """Regular icosahedron with (tau', 0, 1) and (-tau', 0, 1) among its vertices."""
    w = Window(icosahedron_vertices(), translate)
    edge2 = 4 * (TAU - 1) * (TAU - 1)
    circum2 = 3 - TAU
    assert len(w.vertices) == 12 and len(w.faces) == 20
    edges = window_edges(w)
    assert len(edges) == 30
    assert all((a - b).norm2() == edge2 for a, b in edges), "icosahedron edges differ"
    assert all(v.norm2() == circum2 for v in w.vertices), "icosahedron circumradius differs"
    return w


def window_edges(w: Window) -> list[tuple[Point3, Point3]]:
    edges = set()
    for f in w.faces:
        k = len(f.vertices)
        for i in range(k):
            a, b = f.vertices[i], f.vertices[(i + 1) % k]
            edges.add(frozenset((a, b)))
    return [tuple(e) for e in edges]


def example_shift() -> Point3:
    """The generic shift 10^-3 (1, 1, 1)."""
    from fractions import Fraction

    c = Fraction(1, 1000)
    return Point3(c, c, c)
