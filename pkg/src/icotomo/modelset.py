"""Cut-and-project patches of F-type icosahedral model sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from .geometry import FIVEFOLD_AXIS, ORIGIN, ModulePoint, Point3, embed
from .qtau import TAU_FLOAT, QTau, to_float
from .window import Location, Window, classify

SQRT5 = math.sqrt(5.0)
TAUC_FLOAT = 1.0 - TAU_FLOAT


@dataclass(frozen=True)
class Ball:
    center: Point3
    radius: Fraction

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    def contains(self, p: Point3) -> bool:
        # radius 0 is the empty region
        if self.radius == 0:
            return False
        return ((p - self.center).norm2() - QTau(self.radius * self.radius)).sign() <= 0

    def box(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        c = self.center.to_float()
        r = float(self.radius)
        return tuple(x - r for x in c), tuple(x + r for x in c)

    @property
    def is_empty(self) -> bool:
        return self.radius == 0


@dataclass(frozen=True)
class Box:
    lo: Point3
    hi: Point3

    def contains(self, p: Point3) -> bool:
        return all(lo <= x <= hi for lo, x, hi in zip(self.lo, p, self.hi))

    def box(self):
        return self.lo.to_float(), self.hi.to_float()

    @property
    def is_empty(self) -> bool:
        return any(lo > hi for lo, hi in zip(self.lo, self.hi))


Region = Union[Ball, Box]


@dataclass(frozen=True)
class PatchSpec:
    window: Window
    region: Region
    global_translate: Point3 = ORIGIN

    def contains(self, mp: ModulePoint) -> bool:
        p = embed(mp)
        if not self.region.contains(p + self.global_translate):
            return False
        return classify(self.window, p.star()) is Location.INTERIOR


@dataclass
class Patch:
    points: list[ModulePoint]
    spec: PatchSpec

    def physical(self) -> list[Point3]:
        t = self.spec.global_translate
        return [embed(p) + t for p in self.points]

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class Slice:
    height: QTau
    points: list[ModulePoint]
    normal: Point3 = field(default=FIVEFOLD_AXIS)

    def physical(self) -> list[Point3]:
        return [embed(p) for p in self.points]

    def __len__(self) -> int:
        return len(self.points)


def _ztau_pairs(lo: float, hi: float, lo_c: float, hi_c: float) -> Iterator[tuple[int, int]]:
    """Integer (m, n) with m + n tau roughly in [lo, hi] and m + n tau' in [lo_c, hi_c].

    The ranges are widened by one unit on each side so that the result is a
    superset of the exact solution set; callers filter exactly.
    """
    if lo > hi or lo_c > hi_c:
        return
    # n = (c - c') / sqrt5
    n_lo = math.floor((lo - hi_c) / SQRT5) - 1
    n_hi = math.ceil((hi - lo_c) / SQRT5) + 1
    for n in range(n_lo, n_hi + 1):
        m_lo = math.ceil(max(lo - n * TAU_FLOAT, lo_c - n * TAUC_FLOAT)) - 1
        m_hi = math.floor(min(hi - n * TAU_FLOAT, hi_c - n * TAUC_FLOAT)) + 1
        for m in range(m_lo, m_hi + 1):
            yield m, n


def candidate_coefficients(
    phys_box: tuple[tuple[float, ...], tuple[float, ...]],
    int_box: tuple[tuple[float, ...], tuple[float, ...]],
) -> Iterator[ModulePoint]:
    """Superset of L-points with embedding in ``phys_box`` and star image in ``int_box``.

    Uses x = c1 + c2 (tau+1)/2, y = c2 tau/2, z = c2/2 + c3 in both spaces.
    """
    (xlo, ylo, zlo), (xhi, yhi, zhi) = phys_box
    (Xlo, Ylo, Zlo), (Xhi, Yhi, Zhi) = int_box
    k = 2.0 * (TAU_FLOAT - 1.0)
    kc = 2.0 * (TAUC_FLOAT - 1.0)  # negative
    c2_lo, c2_hi = k * ylo, k * yhi
    c2c_lo, c2c_hi = kc * Yhi, kc * Ylo
    for m2, n2 in _ztau_pairs(c2_lo, c2_hi, c2c_lo, c2c_hi):
        v = m2 + n2 * TAU_FLOAT
        vc = m2 + n2 * TAUC_FLOAT
        sx, sxc = v * (TAU_FLOAT + 1.0) / 2.0, vc * (TAUC_FLOAT + 1.0) / 2.0
        sz, szc = v / 2.0, vc / 2.0
        c1s = list(_ztau_pairs(xlo - sx, xhi - sx, Xlo - sxc, Xhi - sxc))
        c3s = list(_ztau_pairs(zlo - sz, zhi - sz, Zlo - szc, Zhi - szc))
        for m1, n1 in c1s:
            for m3, n3 in c3s:
                yield ModulePoint(m1, n1, m2, n2, m3, n3)


def _phys_box(spec: PatchSpec):
    lo, hi = spec.region.box()
    t = spec.global_translate.to_float()
    return tuple(a - b for a, b in zip(lo, t)), tuple(a - b for a, b in zip(hi, t))


def generate(spec: PatchSpec) -> Patch:
    """All ``alpha`` in L with ``t + alpha`` in the region and ``alpha*`` interior to ``s + W``."""
    if spec.region.is_empty:
        return Patch([], spec)
    found = [mp for mp in candidate_coefficients(_phys_box(spec), spec.window.bounding_box()) if spec.contains(mp)]
    found.sort()
    return Patch(found, spec)


@dataclass
class GenericityReport:
    checked: int
    boundary_hits: list[ModulePoint]

    @property
    def clean(self) -> bool:
        return not self.boundary_hits


def check_generic_bounded(spec: PatchSpec, margin: Fraction = Fraction(1, 10)) -> GenericityReport:
    """Look for L-points in range whose star image lies on the window boundary.

    A clean report certifies genericity only for the enumerated points.
    """
    if spec.region.is_empty:
        return GenericityReport(0, [])
    lo, hi = spec.window.bounding_box()
    mg = float(margin)
    int_box = (tuple(x - mg for x in lo), tuple(x + mg for x in hi))
    hits = []
    checked = 0
    for mp in candidate_coefficients(_phys_box(spec), int_box):
        p = embed(mp)
        if not spec.region.contains(p + spec.global_translate):
            continue
        checked += 1
        if classify(spec.window, p.star()) is Location.BOUNDARY:
            hits.append(mp)
    hits.sort()
    return GenericityReport(checked, hits)


def slice_patch(patch: Union[Patch, list[ModulePoint]], normal: Point3 = FIVEFOLD_AXIS) -> list[Slice]:
    """Partition points by the exact value of ``embed(p) . (tau, 0, 1)``."""
    points = patch.points if isinstance(patch, Patch) else patch
    groups: dict[QTau, list[ModulePoint]] = {}
    for mp in points:
        groups.setdefault(embed(mp).dot(normal), []).append(mp)
    out = [Slice(h, sorted(pts), normal) for h, pts in groups.items()]
    out.sort(key=lambda s: (to_float(s.height), s.height.a, s.height.b))
    return out


def central_slice(patch: Patch) -> Slice:
    for s in slice_patch(patch):
        if s.height.is_zero:
            return s
    return Slice(QTau(0), [], FIVEFOLD_AXIS)


def example_spec(radius: Union[int, Fraction] = 3, shift: Optional[Point3] = None) -> PatchSpec:
    """Icosahedral window shifted by 10^-3 (1,1,1), ball about the origin."""
    from .window import example_shift, window_icosahedron

    s = example_shift() if shift is None else shift
    return PatchSpec(window_icosahedron(s), Ball(ORIGIN, Fraction(radius)))
