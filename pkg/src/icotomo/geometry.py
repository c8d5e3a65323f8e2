"""Points of Q(tau)^3, the module L, directions, line keys and exact hulls."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .qtau import HALF, TAU, ZERO, QTau, ZTau, to_float


class Point3:
    __slots__ = ("x", "y", "z", "_hash")

    def __init__(self, x, y, z):
        self.x = QTau.coerce(x)
        self.y = QTau.coerce(y)
        self.z = QTau.coerce(z)
        self._hash = None

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def __add__(self, o: "Point3") -> "Point3":
        return Point3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: "Point3") -> "Point3":
        return Point3(self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self) -> "Point3":
        return Point3(-self.x, -self.y, -self.z)

    def scale(self, k) -> "Point3":
        return Point3(self.x * k, self.y * k, self.z * k)

    def __mul__(self, k) -> "Point3":
        return self.scale(k)

    __rmul__ = __mul__

    def dot(self, o: "Point3") -> QTau:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o: "Point3") -> "Point3":
        return Point3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )

    def norm2(self) -> QTau:
        return self.dot(self)

    @property
    def is_zero(self) -> bool:
        return self.x.is_zero and self.y.is_zero and self.z.is_zero

    def star(self) -> "Point3":
        return Point3(self.x.galois(), self.y.galois(), self.z.galois())

    def to_float(self) -> tuple[float, float, float]:
        return (to_float(self.x), to_float(self.y), to_float(self.z))

    def sort_key(self):
        """Canonical total order on exact coordinates (lexicographic on (a, b))."""
        return (self.x.a, self.x.b, self.y.a, self.y.b, self.z.a, self.z.b)

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, Point3):
            return NotImplemented
        return self.x == o.x and self.y == o.y and self.z == o.z

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.x, self.y, self.z))
        return self._hash

    def __repr__(self) -> str:
        return f"Point3({self.x}, {self.y}, {self.z})"


ORIGIN = Point3(0, 0, 0)
FIVEFOLD_AXIS = Point3(TAU, 0, 1)
FIVEFOLD_AXIS_STAR = FIVEFOLD_AXIS.star()

# basis of L = 1/2 M_F
BASIS = (
    Point3(1, 0, 0),
    Point3((TAU + 1) * HALF, TAU * HALF, HALF),
    Point3(0, 0, 1),
)


def star(p: Point3) -> Point3:
    return p.star()


class ModulePoint:
    """Element of L as coefficients ``c_i = m_i + n_i tau`` over :data:`BASIS`."""

    __slots__ = ("coeffs",)

    def __init__(self, m1: int, n1: int, m2: int, n2: int, m3: int, n3: int):
        self.coeffs = (int(m1), int(n1), int(m2), int(n2), int(m3), int(n3))

    @classmethod
    def from_ztau(cls, c1: ZTau, c2: ZTau, c3: ZTau) -> "ModulePoint":
        return cls(c1.m, c1.n, c2.m, c2.n, c3.m, c3.n)

    @property
    def c1(self) -> ZTau:
        return ZTau(self.coeffs[0], self.coeffs[1])

    @property
    def c2(self) -> ZTau:
        return ZTau(self.coeffs[2], self.coeffs[3])

    @property
    def c3(self) -> ZTau:
        return ZTau(self.coeffs[4], self.coeffs[5])

    def __add__(self, o: "ModulePoint") -> "ModulePoint":
        return ModulePoint(*(u + v for u, v in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o: "ModulePoint") -> "ModulePoint":
        return ModulePoint(*(u - v for u, v in zip(self.coeffs, o.coeffs)))

    def embed(self) -> Point3:
        return embed(self)

    def __eq__(self, o: object) -> bool:
        return isinstance(o, ModulePoint) and self.coeffs == o.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __lt__(self, o: "ModulePoint") -> bool:
        return self.coeffs < o.coeffs

    def __repr__(self) -> str:
        return "ModulePoint({}, {}, {}, {}, {}, {})".format(*self.coeffs)


def embed(mp: ModulePoint) -> Point3:
    m1, n1, m2, n2, m3, n3 = mp.coeffs
    # x = c1 + c2 (tau+1)/2, y = c2 tau/2, z = c2/2 + c3
    c2 = QTau._raw(m2, n2, 1)
    x = QTau._raw(m1, n1, 1) + QTau._raw(m2 + n2, m2 + 2 * n2, 2)
    y = QTau._raw(n2, m2 + n2, 2)
    z = c2 * HALF + QTau._raw(m3, n3, 1)
    return Point3(x, y, z)


def coefficients(p: Point3) -> tuple[QTau, QTau, QTau]:
    """Coefficients of ``p`` over :data:`BASIS` (always exist over Q(tau))."""
    c2 = p.y * 2 * (TAU - 1)
    c1 = p.x - p.y * TAU
    c3 = p.z - p.y * (TAU - 1)
    return c1, c2, c3


def membership(p: Point3) -> Optional[ModulePoint]:
    """The module coefficients of ``p`` if ``p`` lies in L, else None."""
    cs = coefficients(p)
    if not all(c.is_integral for c in cs):
        return None
    return ModulePoint.from_ztau(*(ZTau.from_qtau(c) for c in cs))


def in_module(p: Point3) -> bool:
    return all(c.is_integral for c in coefficients(p))


def l_witness(v: Point3) -> ModulePoint:
    """Smallest positive integer multiple of ``v`` lying in L."""
    if v.is_zero:
        raise ValueError("zero vector has no direction")
    k = 1
    for c in coefficients(v):
        for r in (c.a, c.b):
            k = k * r.denominator // math.gcd(k, r.denominator)
    mp = membership(v.scale(k))
    assert mp is not None
    return mp


def projective_key(v: Point3) -> Point3:
    for c in v:
        if not c.is_zero:
            inv = c.inverse()
            return v.scale(inv)
    raise ValueError("zero vector has no direction")


class Direction:
    """A direction in R^3 given by a nonzero vector of Q(tau)^3."""

    __slots__ = ("representative", "canonical_key", "witness", "_axis_orthogonal")

    def __init__(self, v: Point3):
        if v.is_zero:
            raise ValueError("zero vector is not a direction")
        self.representative = v
        self.canonical_key = projective_key(v)
        # every Q(tau)^3 vector has an integer multiple in L
        self.witness = l_witness(v)
        self._axis_orthogonal = v.dot(FIVEFOLD_AXIS).is_zero

    @classmethod
    def from_module(cls, mp: ModulePoint) -> "Direction":
        return cls(embed(mp))

    @property
    def is_l_direction(self) -> bool:
        return True

    @property
    def is_fivefold_orthogonal(self) -> bool:
        """True for an L^(tau,0,1)-direction."""
        return self._axis_orthogonal

    @property
    def vector(self) -> Point3:
        """The L-witness vector, used for arithmetic along lines."""
        return embed(self.witness)

    def parallel(self, other: "Direction") -> bool:
        return self.canonical_key == other.canonical_key

    def star(self) -> "Direction":
        return Direction(self.representative.star())

    def __eq__(self, o: object) -> bool:
        return isinstance(o, Direction) and self.canonical_key == o.canonical_key

    def __hash__(self) -> int:
        return hash(self.canonical_key)

    def __repr__(self) -> str:
        return f"Direction({self.representative!r})"


def make_direction(v: Point3) -> Direction:
    return Direction(v)


class LineKey:
    """Canonical key of a line: its direction and its foot point ``base`` with ``base . u = 0``."""

    __slots__ = ("direction", "base")

    def __init__(self, direction: Direction, base: Point3):
        self.direction = direction
        self.base = base

    def contains(self, p: Point3) -> bool:
        return (p - self.base).cross(self.direction.canonical_key).is_zero

    def star(self) -> "LineKey":
        return line_key(self.base.star(), self.direction.star())

    def __eq__(self, o: object) -> bool:
        return isinstance(o, LineKey) and self.direction == o.direction and self.base == o.base

    def __hash__(self) -> int:
        return hash((self.direction, self.base))

    def __repr__(self) -> str:
        return f"LineKey(base={self.base!r}, dir={self.direction.canonical_key!r})"


def line_key(p: Point3, u: Direction) -> LineKey:
    d = u.canonical_key
    t = p.dot(d) / d.norm2()
    return LineKey(u, p - d.scale(t))


def intersect_lines(l1: LineKey, l2: LineKey) -> Optional[Point3]:
    """Exact intersection point of two non-parallel lines, None when skew."""
    u1, u2 = l1.direction.canonical_key, l2.direction.canonical_key
    n = u1.cross(u2)
    nn = n.norm2()
    if nn.is_zero:
        raise ValueError("parallel lines")
    w = l2.base - l1.base
    if not w.dot(n).is_zero:
        return None
    s = w.cross(u2).dot(n) / nn
    return l1.base + u1.scale(s)


# -- planar predicates ----------------------------------------------------------


def drop_axis(normal: Point3) -> int:
    """Coordinate index whose omission maps the plane with this normal injectively."""
    for i, c in enumerate(normal):
        if not c.is_zero:
            return i
    raise ValueError("zero normal")


def project2(p: Point3, drop: int) -> tuple[QTau, QTau]:
    c = (p.x, p.y, p.z)
    if drop == 0:
        return (c[1], c[2])
    if drop == 1:
        return (c[2], c[0])
    return (c[0], c[1])


def orient2(a, b, c) -> int:
    """Sign of the 2x2 determinant |b-a, c-a| for planar points given as pairs."""
    return ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).sign()


def orient3(a: Point3, b: Point3, c: Point3, d: Point3) -> int:
    return (b - a).cross(c - a).dot(d - a).sign()


def convex_hull_2d_coords(pts: Sequence[tuple[QTau, QTau]]) -> list[int]:
    """Strict convex hull (Andrew's monotone chain) of planar points.

    Returns indices into ``pts`` in counter-clockwise order (w.r.t. the
    coordinate orientation); collinear boundary points are dropped.
    """
    order = sorted(set(range(len(pts))), key=lambda i: (pts[i][0], pts[i][1]))
    uniq: list[int] = []
    for i in order:
        if not uniq or pts[uniq[-1]] != pts[i]:
            uniq.append(i)
    if len(uniq) <= 2:
        return uniq

    def chain(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and orient2(pts[out[-2]], pts[out[-1]], pts[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and pts[hull[0]] == pts[hull[1]]:
        hull = hull[:1]
    return hull


class Hull2D:
    """Result of :func:`convex_hull_2d`: extreme points and the affine dimension."""

    def __init__(self, vertices: list[Point3], dimension: int, normal: Optional[Point3]):
        self.vertices = vertices
        self.dimension = dimension
        self.normal = normal

    def __repr__(self) -> str:
        return f"Hull2D(dim={self.dimension}, n={len(self.vertices)})"


def affine_dimension(points: Sequence[Point3]) -> int:
    pts = list(dict.fromkeys(points))
    if not pts:
        return -1
    if len(pts) == 1:
        return 0
    p0 = pts[0]
    u = next((q - p0 for q in pts[1:] if not (q - p0).is_zero), None)
    if u is None:
        return 0
    n = next((u.cross(q - p0) for q in pts[1:] if not u.cross(q - p0).is_zero), None)
    if n is None:
        return 1
    if any(not n.dot(q - p0).is_zero for q in pts[1:]):
        return 3
    return 2


def plane_normal(points: Sequence[Point3]) -> Optional[Point3]:
    pts = list(dict.fromkeys(points))
    if len(pts) < 3:
        return None
    p0 = pts[0]
    for q, r in itertools.combinations(pts[1:], 2):
        n = (q - p0).cross(r - p0)
        if not n.is_zero:
            return n
    return None


def convex_hull_2d(points: Sequence[Point3], normal: Optional[Point3] = None) -> Hull2D:
    """Hull of points in a common plane; the vertex list is cyclically ordered.

    Lower-dimensional inputs return their extreme points and affine dimension
    (0 or 1).  ``normal`` fixes the orientation; without it one is derived.
    """
    pts = list(dict.fromkeys(points))
    dim = affine_dimension(pts)
    if dim >= 3:
        raise ValueError("points are not coplanar")
    if dim <= 0:
        return Hull2D(pts, dim, normal)
    if normal is None:
        normal = plane_normal(pts)
    if normal is None:
        # collinear: the two extreme points along the line
        u = next(q - pts[0] for q in pts[1:] if not (q - pts[0]).is_zero)
        keyed = sorted(pts, key=lambda q: q.dot(u))
        return Hull2D([keyed[0], keyed[-1]], 1, None)
    drop = drop_axis(normal)
    coords = [project2(p, drop) for p in pts]
    idx = convex_hull_2d_coords(coords)
    verts = [pts[i] for i in idx]
    if dim == 1:
        return Hull2D(verts, 1, normal)
    # make the order counter-clockwise about ``normal``
    if len(verts) >= 3 and (verts[1] - verts[0]).cross(verts[2] - verts[1]).dot(normal).sign() < 0:
        verts.reverse()
    return Hull2D(verts, 2, normal)


class Face:
    """Planar facet of a 3D hull with inward normal: interior has ``normal . x > offset``."""

    __slots__ = ("normal", "offset", "vertices")

    def __init__(self, normal: Point3, offset: QTau, vertices: list[Point3]):
        self.normal = normal
        self.offset = offset
        self.vertices = vertices

    def value(self, q: Point3) -> QTau:
        """Face functional ``offset - normal . q``: negative inside, zero on the plane."""
        return self.offset - self.normal.dot(q)

    def __repr__(self) -> str:
        return f"Face(n={self.normal!r}, c={self.offset}, k={len(self.vertices)})"


class Hull3D:
    def __init__(self, dimension: int, faces: list[Face], vertices: list[Point3]):
        self.dimension = dimension
        self.faces = faces
        self.vertices = vertices

    def __repr__(self) -> str:
        return f"Hull3D(dim={self.dimension}, faces={len(self.faces)})"


def convex_hull_3d(points: Sequence[Point3]) -> Hull3D:
    """Exact 3D hull by supporting-plane enumeration; fine for small point sets.

    Degenerate inputs are reported with their affine dimension and no faces.
    """
    pts = list(dict.fromkeys(points))
    dim = affine_dimension(pts)
    if dim < 3:
        if dim == 2:
            h = convex_hull_2d(pts)
            return Hull3D(2, [], h.vertices)
        if dim == 1:
            h = convex_hull_2d(pts)
            return Hull3D(1, [], h.vertices)
        return Hull3D(dim, [], pts)
    seen: set[frozenset[int]] = set()
    faces: list[Face] = []
    n = len(pts)
    for i, j, k in itertools.combinations(range(n), 3):
        normal = (pts[j] - pts[i]).cross(pts[k] - pts[i])
        if normal.is_zero:
            continue
        signs = [normal.dot(pts[m] - pts[i]).sign() for m in range(n)]
        pos = any(s > 0 for s in signs)
        neg = any(s < 0 for s in signs)
        if pos and neg:
            continue
        on = frozenset(m for m in range(n) if signs[m] == 0)
        if on in seen:
            continue
        seen.add(on)
        if neg:
            normal = -normal
        offset = normal.dot(pts[i])
        fverts = convex_hull_2d([pts[m] for m in sorted(on)], normal).vertices
        faces.append(Face(normal, offset, fverts))
    verts = list(dict.fromkeys(v for f in faces for v in f.vertices))
    return Hull3D(3, faces, verts)


def centroid(points: Iterable[Point3]) -> Point3:
    pts = list(points)
    s = ORIGIN
    for p in pts:
        s = s + p
    return s.scale(QTau(Fraction(1, len(pts))))


def dot_qtau(u: Sequence[QTau], v: Sequence[QTau]) -> QTau:
    total = ZERO
    for a, b in zip(u, v):
        total = total + a * b
    return total




# -- in-plane directions orthogonal to the 5-fold axis (tau, 0, 1) ---------------

_ROT_COS = (TAU - 1) * HALF
_ROT_K = (3 - TAU) / ((TAU + 2) * 2)


def rotate_fivefold(v: Point3, times: int = 1) -> Point3:
    """Rotate ``v`` by 72 degrees about the 5-fold axis (tau, 0, 1), exactly.

    Rodrigues' formula; with |axis|^2 = tau + 2 all coefficients lie in Q(tau).
    """
    n = FIVEFOLD_AXIS
    for _ in range(times % 5):
        v = v.scale(_ROT_COS) + n.cross(v).scale(HALF) + n.scale(_ROT_K * n.dot(v))
    return v


def fivefold_directions() -> list[Direction]:
    """The five L-directions (0,1,0) R^k, k = 0..4, pairwise 36 degrees apart mod 180."""
    e = Point3(0, 1, 0)
    return [Direction(rotate_fivefold(e, k)) for k in range(5)]
