"""Convex subsets, U-polygons and (non-)determination by X-rays."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .geometry import (
    Direction,
    ModulePoint,
    Point3,
    affine_dimension,
    convex_hull_2d,
    convex_hull_3d,
    drop_axis,
    embed,
    line_key,
    plane_normal,
    project2,
)
from .modelset import Patch, Slice
from .tomography import xray

Ambient = Union[Slice, Patch, Sequence[Point3], Sequence[ModulePoint]]


class UniquenessError(ValueError):
    pass


def as_points(pts) -> list[Point3]:
    if isinstance(pts, (Slice, Patch)):
        return pts.physical()
    return [embed(p) if isinstance(p, ModulePoint) else p for p in pts]


# -- convexity -----------------------------------------------------------------


class ClosedHull:
    """Closed convex hull of a finite point set with an exact membership test."""

    def __init__(self, points: Sequence[Point3]):
        self.points = list(dict.fromkeys(points))
        self.dimension = affine_dimension(self.points)
        self.normal = None
        if self.dimension == 3:
            self.faces = convex_hull_3d(self.points).faces
            self.vertices = list(dict.fromkeys(v for f in self.faces for v in f.vertices))
        elif self.dimension == 2:
            self.normal = plane_normal(self.points)
            self.vertices = convex_hull_2d(self.points, self.normal).vertices
        else:
            self.vertices = convex_hull_2d(self.points).vertices if self.points else []

    def contains(self, q: Point3) -> bool:
        if self.dimension < 0:
            return False
        if self.dimension == 0:
            return q == self.points[0]
        if self.dimension == 1:
            a, b = self.vertices
            d = b - a
            if not d.cross(q - a).is_zero:
                return False
            t = (q - a).dot(d)
            return t.sign() >= 0 and (t - d.norm2()).sign() <= 0
        if self.dimension == 2:
            n = self.normal
            v0 = self.vertices[0]
            if not n.dot(q - v0).is_zero:
                return False
            k = len(self.vertices)
            for i in range(k):
                a, b = self.vertices[i], self.vertices[(i + 1) % k]
                if (b - a).cross(q - a).dot(n).sign() < 0:
                    return False
            return True
        return all(f.value(q).sign() <= 0 for f in self.faces)


@dataclass
class ConvexCheck:
    convex: bool
    certificate: Optional[Point3] = None

    def __bool__(self) -> bool:
        return self.convex


def is_convex_subset(C: Sequence[Point3], ambient: Ambient) -> ConvexCheck:
    """Whether ``C = conv(C) ∩ ambient``; the certificate is an offending ambient point.

    The ambient set stands in for the (infinite) model set, so it has to
    contain ``conv(C) ∩ Λ``; a patch over a convex region does.
    """
    C = as_points(C)
    amb = as_points(ambient)
    cset = set(C)
    if len(cset) <= 1:
        return ConvexCheck(True)
    hull = ClosedHull(C)
    for q in amb:
        if q not in cset and hull.contains(q):
            return ConvexCheck(False, q)
    return ConvexCheck(True)


# -- U-polygons ------------------------------------------------------------------


@dataclass
class UPolygon:
    vertices: list[Point3]
    directions: list[Direction]

    def __len__(self) -> int:
        return len(self.vertices)


def _on_line(v: Point3, w: Point3, u: Direction) -> bool:
    return (w - v).cross(u.canonical_key).is_zero


def verify_u_polygon(P: Sequence[Point3], U: Sequence[Direction], ambient: Optional[Ambient] = None) -> bool:
    verts = list(dict.fromkeys(as_points(P)))
    if len(verts) < 3 or len(U) < 1:
        return False
    if affine_dimension(verts) != 2:
        return False
    # strictly convex: every point is a strict hull vertex
    if len(convex_hull_2d(verts).vertices) != len(verts):
        return False
    if ambient is not None:
        amb = set(as_points(ambient))
        if any(v not in amb for v in verts):
            return False
    for u in U:
        for v in verts:
            if not any(w != v and _on_line(v, w, u) for w in verts):
                return False
    return True


class _PlanarIndex:
    """Index of coplanar ambient points with cached exact orientations."""

    def __init__(self, points: Sequence[Point3]):
        self.points = sorted(dict.fromkeys(points), key=Point3.sort_key)
        n = len(self.points)
        if n >= 3 and affine_dimension(self.points) > 2:
            raise UniquenessError("ambient points are not coplanar")
        normal = plane_normal(self.points) if n >= 3 else None
        drop = drop_axis(normal) if normal is not None else 2
        if normal is None and n >= 2:
            d = self.points[1] - self.points[0]
            drop = next(i for i in range(3) if not (d.x, d.y, d.z)[i].is_zero)
            drop = (drop + 1) % 3
        self.coords = [project2(p, drop) for p in self.points]
        self.index = {p: i for i, p in enumerate(self.points)}
        order = sorted(range(n), key=lambda i: (self.coords[i][0], self.coords[i][1]))
        self.rank = [0] * n
        for r, i in enumerate(order):
            self.rank[i] = r
        self._orient: dict[tuple[int, int, int], int] = {}
        self._tri: dict[tuple[int, int, int], int] = {}

    def __len__(self) -> int:
        return len(self.points)

    def orient(self, i: int, j: int, k: int) -> int:
        key = (i, j, k)
        s = self._orient.get(key)
        if s is None:
            a, b, c = self.coords[i], self.coords[j], self.coords[k]
            s = ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).sign()
            # cache all permutations
            for (x, y, z), sg in (((i, j, k), s), ((j, k, i), s), ((k, i, j), s), ((j, i, k), -s), ((i, k, j), -s), ((k, j, i), -s)):
                self._orient[(x, y, z)] = sg
        return s

    def hull(self, idx: Sequence[int]) -> list[int]:
        """Strict hull vertices (counter-clockwise in projected coordinates)."""
        pts = sorted(set(idx), key=lambda i: self.rank[i])
        if len(pts) <= 2:
            return pts

        def chain(seq):
            out: list[int] = []
            for i in seq:
                while len(out) >= 2 and self.orient(out[-2], out[-1], i) <= 0:
                    out.pop()
                out.append(i)
            return out

        lower = chain(pts)
        upper = chain(list(reversed(pts)))
        return lower[:-1] + upper[:-1]

    def strictly_convex(self, idx: Sequence[int]) -> bool:
        return len(self.hull(idx)) == len(set(idx))

    def between(self, a: int, b: int, r: int) -> bool:
        """r on the closed segment [a, b] (points assumed collinear)."""
        pa, pb, pr = self.coords[a], self.coords[b], self.coords[r]
        t1 = (pr[0] - pa[0]) * (pb[0] - pa[0]) + (pr[1] - pa[1]) * (pb[1] - pa[1])
        t2 = (pr[0] - pb[0]) * (pa[0] - pb[0]) + (pr[1] - pb[1]) * (pa[1] - pb[1])
        return t1.sign() >= 0 and t2.sign() >= 0

    def triangle_mask(self, i: int, j: int, k: int) -> int:
        """Bitmask of ambient points in the closed hull of points i, j, k."""
        key = (i, j, k)
        mask = self._tri.get(key)
        if mask is None:
            mask = self._tri[key] = self._triangle_mask(i, j, k)
        return mask

    def _triangle_mask(self, i: int, j: int, k: int) -> int:
        n = len(self.points)
        mask = 0
        o = self.orient(i, j, k) if len({i, j, k}) == 3 else 0
        if o == 0:
            ids = list(dict.fromkeys((i, j, k)))
            if len(ids) == 1:
                return 1 << i
            # extreme pair of the collinear triple
            a, b = ids[0], ids[1]
            for c in ids[2:]:
                if self.between(a, c, b):
                    b = c
                elif self.between(c, b, a):
                    a = c
            for r in range(n):
                if r in (a, b) or (self.orient(a, b, r) == 0 and self.between(a, b, r)):
                    mask |= 1 << r
            return mask
        for r in range(n):
            if r in (i, j, k):
                mask |= 1 << r
                continue
            s1, s2, s3 = self.orient(i, j, r), self.orient(j, k, r), self.orient(k, i, r)
            if o > 0:
                if s1 >= 0 and s2 >= 0 and s3 >= 0:
                    mask |= 1 << r
            elif s1 <= 0 and s2 <= 0 and s3 <= 0:
                mask |= 1 << r
        return mask


def find_u_polygon(ambient: Ambient, U: Sequence[Direction], max_vertices: int = 10) -> Optional[UPolygon]:
    """Exhaustive search for a U-polygon with at most ``max_vertices`` vertices.

    Every direction pairs the vertices (a line meets a strictly convex polygon
    in at most two vertices), so the search grows a vertex set by following an
    unpaired (vertex, direction) to candidate partners on its line, pruning
    sets that are not in strictly convex position.  Polygon sizes 4, 6, ...
    are tried in turn; the first hit in canonical order is returned.
    """
    if not U:
        raise UniquenessError("need at least one direction")
    idx = _PlanarIndex(as_points(ambient))
    n = len(idx)
    # partners[d][i]: other ambient points on the line through i in direction d
    partners: list[list[list[int]]] = []
    for u in U:
        lines: dict = {}
        for i, p in enumerate(idx.points):
            lines.setdefault(line_key(p, u), []).append(i)
        row = [[] for _ in range(n)]
        for members in lines.values():
            for i in members:
                row[i] = [j for j in members if j != i]
        partners.append(row)
    nd = len(U)

    def extend(S: list[int], inset: set[int], v0: int, cap: int) -> Optional[list[int]]:
        for v in S:
            for d in range(nd):
                if any(w in inset for w in partners[d][v]):
                    continue
                if len(S) >= cap:
                    return None
                for w in partners[d][v]:
                    if w <= v0 or w in inset:
                        continue
                    S2 = S + [w]
                    if len(S2) >= 3 and not idx.strictly_convex(S2):
                        continue
                    inset.add(w)
                    res = extend(S2, inset, v0, cap)
                    inset.discard(w)
                    if res is not None:
                        return res
                return None
        return S if len(S) >= 3 else None

    for cap in range(4, max_vertices + 1, 2):
        for v0 in range(n):
            res = extend([v0], {v0}, v0, cap)
            if res is not None and len(res) == cap:
                order = idx.hull(res)
                verts = [idx.points[i] for i in order]
                if not verify_u_polygon(verts, U):
                    raise UniquenessError("search produced an invalid U-polygon")
                return UPolygon(verts, list(U))
    return None


def witness_pair(P: UPolygon, ambient: Ambient) -> tuple[list[Point3], list[Point3]]:
    """Two distinct convex subsets with equal X-rays in every direction of ``P``.

    Vertices are 2-coloured alternately around the polygon; both sets share
    the ambient points inside the polygon that are not vertices.
    """
    verts = P.vertices
    k = len(verts)
    if k % 2:
        raise UniquenessError("alternating coloring impossible: odd number of vertices")
    if not verify_u_polygon(verts, P.directions, ambient):
        raise UniquenessError("not a U-polygon in the ambient set")
    # cyclic order from the hull
    verts = convex_hull_2d(verts).vertices
    parity = {v: i % 2 for i, v in enumerate(verts)}
    for u in P.directions:
        for v in verts:
            w = next(w for w in verts if w != v and _on_line(v, w, u))
            if parity[v] == parity[w]:
                raise UniquenessError("direction pairing is inconsistent with the alternating coloring")
    amb = as_points(ambient)
    hull = ClosedHull(verts)
    vset = set(verts)
    inner = [q for q in amb if q not in vset and hull.contains(q)]
    c1 = sorted(inner + [v for v in verts if parity[v] == 0], key=Point3.sort_key)
    c2 = sorted(inner + [v for v in verts if parity[v] == 1], key=Point3.sort_key)
    checks = {
        "distinct": set(c1) != set(c2),
        "convex C1": bool(is_convex_subset(c1, amb)),
        "convex C2": bool(is_convex_subset(c2, amb)),
        "equal X-rays": all(xray(c1, u) == xray(c2, u) for u in P.directions),
    }
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise UniquenessError(f"witness pair failed: {', '.join(failed)}")
    return c1, c2


# -- bounded determination -------------------------------------------------------


@dataclass
class Determined:
    size_bound: int
    subsets_checked: int

    determined = True


@dataclass
class Counterexample:
    first: list[Point3]
    second: list[Point3]
    subsets_checked: int

    determined = False


def _mask_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def convex_subsets(ambient: Ambient, size_bound: int):
    """Yield ``(size, masks)`` levels of convex subsets of a planar ambient set.

    Removing a hull vertex from a convex subset leaves a convex subset, so
    level k+1 is reached from level k by adding single points whose hull
    closure adds nothing else.
    """
    idx = _PlanarIndex(as_points(ambient))
    n = len(idx)
    level = {1 << i: [i] for i in range(n)}
    size = 1
    while level and size <= size_bound:
        yield size, idx, level
        if size == size_bound:
            return
        nxt: dict[int, list[int]] = {}
        for mask in sorted(level):
            hull = level[mask]
            h = len(hull)
            for p in range(n):
                bit = 1 << p
                if mask & bit:
                    continue
                new = mask | bit
                if new in nxt:
                    continue
                closure = mask | bit
                if h == 1:
                    closure |= idx.triangle_mask(p, hull[0], hull[0])
                elif h == 2:
                    closure |= idx.triangle_mask(p, hull[0], hull[1])
                else:
                    for i in range(h):
                        closure |= idx.triangle_mask(p, hull[i], hull[(i + 1) % h])
                        if closure != new:
                            break
                if closure == new:
                    nxt[new] = idx.hull(hull + [p])
        level = nxt
        size += 1


def check_determination(ambient: Ambient, U: Sequence[Direction], size_bound: int = 10) -> Union[Determined, Counterexample]:
    """Exhaustive collision search among convex subsets with at most ``size_bound`` points."""
    pts = as_points(ambient)
    line_ids: list[list[int]] = []
    checked = 0
    idx_ref = None
    for size, idx, level in convex_subsets(pts, size_bound):
        if idx_ref is None:
            idx_ref = idx
            for u in U:
                ids: dict = {}
                line_ids.append([ids.setdefault(line_key(p, u), len(ids)) for p in idx.points])
        seen: dict[tuple, int] = {}
        for mask in sorted(level):
            members = _mask_indices(mask)
            fp = tuple(tuple(sorted(row[i] for i in members)) for row in line_ids)
            checked += 1
            other = seen.get(fp)
            if other is not None:
                a = [idx.points[i] for i in _mask_indices(other)]
                b = [idx.points[i] for i in members]
                return Counterexample(a, b, checked)
            seen[fp] = mask
    return Determined(size_bound, checked)


def in_convex_position(points: Sequence[Point3]) -> bool:
    pts = list(dict.fromkeys(points))
    if len(pts) <= 2:
        return True
    return len(convex_hull_2d(pts).vertices) == len(pts)


def xray_multiset_equal(a: Sequence[Point3], b: Sequence[Point3], U: Sequence[Direction]) -> bool:
    return all(Counter(xray(a, u).counts) == Counter(xray(b, u).counts) for u in U)
