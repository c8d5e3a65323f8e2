"""Discrete parallel X-rays, grids and L-coset classification."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .geometry import (
    Direction,
    LineKey,
    Point3,
    coefficients,
    in_module,
    intersect_lines,
    line_key,
)
from .qtau import QTau


@dataclass
class XRayData:
    """The X-ray of a finite set in one direction, restricted to its support."""

    direction: Direction
    counts: dict[LineKey, int] = field(default_factory=dict)

    def __post_init__(self):
        for line, c in self.counts.items():
            if c < 1:
                raise ValueError("X-ray counts must be positive on the support")
            if line.direction != self.direction:
                raise ValueError("line direction does not match X-ray direction")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def support(self) -> list[LineKey]:
        return sorted(self.counts, key=lambda ln: ln.base.sort_key())

    def __getitem__(self, line: LineKey) -> int:
        return self.counts.get(line, 0)

    def count_multiset(self) -> Counter:
        return Counter(self.counts.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, XRayData):
            return NotImplemented
        return self.direction == other.direction and self.counts == other.counts


def xray(points: Iterable[Point3], u: Direction) -> XRayData:
    counts: dict[LineKey, int] = {}
    for p in points:
        k = line_key(p, u)
        counts[k] = counts.get(k, 0) + 1
    return XRayData(u, counts)


@dataclass
class Grid:
    points: list[Point3]
    directions: list[Direction]
    tags: Optional[list[int]] = None
    l_class: Optional[int] = None

    def __len__(self) -> int:
        return len(self.points)

    def classes(self) -> dict[int, list[Point3]]:
        if self.tags is None:
            raise ValueError("grid has not been coset-classified")
        out: dict[int, list[Point3]] = {}
        for p, t in zip(self.points, self.tags):
            out.setdefault(t, []).append(p)
        return out


def _check_directions(dirs: Sequence[Direction]) -> None:
    for a, b in itertools.combinations(dirs, 2):
        if a.parallel(b):
            raise ValueError("X-ray directions must be pairwise non-parallel")


def grid(data: Sequence[XRayData]) -> Grid:
    """Intersection over directions of the unions of support lines."""
    if len(data) < 2:
        raise ValueError("a grid needs at least two directions")
    dirs = [d.direction for d in data]
    _check_directions(dirs)
    first, second = data[0], data[1]
    pts: set[Point3] = set()
    for l1 in first.counts:
        for l2 in second.counts:
            p = intersect_lines(l1, l2)
            if p is not None:
                pts.add(p)
    for extra in data[2:]:
        pts = {p for p in pts if line_key(p, extra.direction) in extra.counts}
    return Grid(sorted(pts, key=Point3.sort_key), dirs)


def same_coset(p: Point3, q: Point3) -> bool:
    return in_module(p - q)


def coset_classify(g: Grid) -> Grid:
    """Tag grid points by their translate class modulo L.

    Classes are numbered in order of their smallest point (canonical order);
    ``l_class`` is the class of L itself, if present.
    """
    reps: list[Point3] = []
    tags: list[int] = []
    for p in g.points:
        for i, r in enumerate(reps):
            if same_coset(p, r):
                tags.append(i)
                break
        else:
            reps.append(p)
            tags.append(len(reps) - 1)
    l_class = next((i for i, r in enumerate(reps) if in_module(r)), None)
    return Grid(g.points, g.directions, tags, l_class)


def line_l_point(line: LineKey) -> Optional[Point3]:
    """A point of L on ``line``, or None if the line misses L.

    Writes the line as base + lam*u with u the L-witness of the direction and
    solves coefficient-wise for lam, reducing the search to residues of one
    Z[tau] coefficient modulo N Z[tau].
    """
    u = line.direction.vector
    gam = coefficients(u)
    beta = coefficients(line.base)
    nz = [i for i in range(3) if not gam[i].is_zero]
    i = min(nz, key=lambda k: abs(gam[k].norm()))
    rho = [gam[j] / gam[i] for j in range(3)]
    n = 1
    for j in range(3):
        for r in (rho[j].a, rho[j].b):
            n = n * r.denominator // math.gcd(n, r.denominator)
    others = [j for j in range(3) if j != i]
    for m, k in itertools.product(range(n), repeat=2):
        z = QTau(m, k)
        lam = (z - beta[i]) / gam[i]
        if all((beta[j] + lam * gam[j]).is_integral for j in others):
            return line.base + u.scale(lam)
    return None


def xrays_equal(a: Iterable[Point3], b: Iterable[Point3], dirs: Sequence[Direction]) -> bool:
    a, b = list(a), list(b)
    return all(xray(a, u) == xray(b, u) for u in dirs)
