"""Two-direction reconstruction under a window constraint.

Candidates are the grid points of the two supports.  For a fixed window
translate the problem splits by L-coset into bipartite b-matching problems
(support lines of the first direction supply, those of the second demand,
admissible grid points are unit arcs) solved by integral maximum flow.  With
the translate unknown, the in-plane translate is searched over the cells of
the arrangement of translated window polygons.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import networkx as nx

from .geometry import (
    FIVEFOLD_AXIS,
    FIVEFOLD_AXIS_STAR,
    LineKey,
    Point3,
    convex_hull_2d_coords,
    drop_axis,
    in_module,
    line_key,
    project2,
)
from .qtau import QTau, to_float
from .tomography import XRayData, coset_classify, grid, line_l_point, xray
from .parallel import ordered_map, worker_count
from .window import Location, Window, classify

log = logging.getLogger(__name__)


class ReconstructionError(ValueError):
    pass


@dataclass
class ReconstructionInstance:
    first: XRayData
    second: XRayData
    window: Window
    translate: Optional[Point3] = None

    def __post_init__(self):
        u1, u2 = self.first.direction, self.second.direction
        if u1.parallel(u2):
            raise ReconstructionError("directions must be non-parallel")
        for u in (u1, u2):
            if not u.is_fivefold_orthogonal:
                raise ReconstructionError("directions must be orthogonal to (tau, 0, 1)")

    @property
    def directions(self):
        return [self.first.direction, self.second.direction]

    def fixed_window(self) -> Window:
        if self.translate is None:
            return self.window
        return self.window.shifted(self.translate)

    def heights(self) -> set[QTau]:
        return {ln.base.dot(FIVEFOLD_AXIS) for d in (self.first, self.second) for ln in d.counts}


@dataclass
class Candidate:
    point: Point3
    line1: LineKey
    line2: LineKey
    tag: int
    admissible: bool


@dataclass
class Solution:
    points: list[Point3]
    coset: int
    translate: Optional[Point3] = None

    feasible = True


@dataclass
class Infeasible:
    reason: str

    feasible = False
    points: list = field(default_factory=list)


Result = Union[Solution, Infeasible]


def check_supports(inst: ReconstructionInstance) -> None:
    """Every support line has to pass through a point of L."""
    for data in (inst.first, inst.second):
        for ln in data.counts:
            if line_l_point(ln) is None:
                raise ReconstructionError(f"support line {ln!r} contains no point of L")


def candidates(inst: ReconstructionInstance, check: bool = True) -> list[Candidate]:
    if check:
        check_supports(inst)
    if not inst.first.counts or not inst.second.counts:
        return []
    g = coset_classify(grid([inst.first, inst.second]))
    w = inst.fixed_window()
    u1, u2 = inst.first.direction, inst.second.direction
    out = []
    for p, tag in zip(g.points, g.tags):
        adm = classify(w, p.star()) is Location.INTERIOR if inst.translate is not None else True
        out.append(Candidate(p, line_key(p, u1), line_key(p, u2), tag, adm))
    return out


# -- flows -------------------------------------------------------------------------


def _feasible_flow(
    supply: dict[LineKey, int],
    demand: dict[LineKey, int],
    arcs: Sequence[Candidate],
) -> Optional[list[Candidate]]:
    """Arcs carrying flow in a saturating integral flow, or None."""
    total = sum(supply.values())
    if total != sum(demand.values()) or any(v < 0 for v in supply.values()) or any(v < 0 for v in demand.values()):
        return None
    if total == 0:
        return []
    # cheap necessary condition: every line can be filled from its own arcs
    room1: dict[LineKey, int] = {}
    room2: dict[LineKey, int] = {}
    for c in arcs:
        room1[c.line1] = room1.get(c.line1, 0) + 1
        room2[c.line2] = room2.get(c.line2, 0) + 1
    if any(room1.get(k, 0) < v for k, v in supply.items()) or any(room2.get(k, 0) < v for k, v in demand.items()):
        return None
    idx1 = {k: i for i, k in enumerate(supply)}
    idx2 = {k: i for i, k in enumerate(demand)}
    G = nx.DiGraph()
    for k, i in idx1.items():
        if supply[k]:
            G.add_edge("s", ("a", i), capacity=supply[k])
    for k, j in idx2.items():
        if demand[k]:
            G.add_edge(("b", j), "t", capacity=demand[k])
    for c in arcs:
        if c.line1 in idx1 and c.line2 in idx2:
            G.add_edge(("a", idx1[c.line1]), ("b", idx2[c.line2]), capacity=1)
    if "s" not in G or "t" not in G:
        return None
    value, flow = nx.maximum_flow(G, "s", "t")
    if value != total:
        return None
    used = []
    for c in arcs:
        a, b = ("a", idx1[c.line1]), ("b", idx2[c.line2])
        if flow.get(a, {}).get(b, 0) == 1:
            used.append(c)
    return used


def _flow_job(job) -> Optional[list[int]]:
    """Picklable wrapper: indices (into the arc list) of the arcs used by a feasible flow."""
    supply, demand, arcs = job
    used = _feasible_flow(supply, demand, arcs)
    if used is None:
        return None
    ids = {id(u) for u in used}
    return [j for j, c in enumerate(arcs) if id(c) in ids]


def _classes(cands: Sequence[Candidate]) -> list[list[Candidate]]:
    by_tag: dict[int, list[Candidate]] = {}
    for c in cands:
        by_tag.setdefault(c.tag, []).append(c)
    # tags are numbered by smallest canonical point already
    return [by_tag[t] for t in sorted(by_tag)]


def verify_solution(inst: ReconstructionInstance, points: Sequence[Point3], translate: Optional[Point3] = None) -> list[str]:
    """Independent post-check; returns the names of failed checks."""
    failed = []
    if xray(points, inst.first.direction) != inst.first or xray(points, inst.second.direction) != inst.second:
        failed.append("xray")
    if len(set(points)) != len(points):
        failed.append("distinct")
    t = translate if translate is not None else inst.translate
    w = inst.window if t is None else inst.window.shifted(t)
    if any(classify(w, p.star()) is not Location.INTERIOR for p in points):
        failed.append("window")
    if any(not in_module(p - points[0]) for p in points[1:]):
        failed.append("coset")
    return failed


def _checked(inst: ReconstructionInstance, sol: Solution) -> Solution:
    failed = verify_solution(inst, sol.points, sol.translate)
    if failed:
        raise ReconstructionError(f"solution failed verification: {', '.join(failed)}")
    return sol


def solve_fixed(inst: ReconstructionInstance, cands: Optional[list[Candidate]] = None) -> Result:
    """First coset class (canonical order) admitting a saturating flow."""
    if inst.first.total != inst.second.total:
        return Infeasible("marginal sums differ")
    if inst.first.total == 0:
        return Solution([], -1, inst.translate)
    if inst.translate is None:
        raise ReconstructionError("solve_fixed needs a window translate")
    if len(inst.heights()) > 1:
        raise ReconstructionError("instance spans several slices; use solve_slices")
    if cands is None:
        cands = candidates(inst)
    for cls in _classes(cands):
        arcs = [c for c in cls if c.admissible]
        used = _feasible_flow(dict(inst.first.counts), dict(inst.second.counts), arcs)
        if used is not None:
            pts = sorted((c.point for c in used), key=Point3.sort_key)
            return _checked(inst, Solution(pts, cls[0].tag, inst.translate))
    return Infeasible("no coset class admits a feasible flow")


@dataclass
class Enumeration:
    solutions: list[Solution]
    truncated: bool

    def __len__(self) -> int:
        return len(self.solutions)


def enumerate_all(inst: ReconstructionInstance, limit: int = 1000) -> Enumeration:
    """All solutions (up to ``limit``) by arc inclusion/exclusion branching."""
    out: list[Solution] = []
    if inst.first.total != inst.second.total:
        return Enumeration(out, False)
    if inst.first.total == 0:
        return Enumeration([Solution([], -1, inst.translate)], False)
    if inst.translate is None:
        raise ReconstructionError("enumerate_all needs a window translate")
    cands = candidates(inst)
    truncated = False

    def branch(supply, demand, forced: list[Candidate], free: list[Candidate], tag: int) -> bool:
        nonlocal truncated
        used = _feasible_flow(supply, demand, free)
        if used is None:
            return True
        if len(out) >= limit:
            truncated = True
            return False
        pts = sorted((c.point for c in forced + used), key=Point3.sort_key)
        out.append(_checked(inst, Solution(pts, tag, inst.translate)))
        # partition the remaining solutions: first j-1 used arcs in, arc j out
        used_order = [c for c in free if any(c is u for u in used)]
        sup, dem = dict(supply), dict(demand)
        fixed = list(forced)
        remaining = list(free)
        for c in used_order:
            remaining = [r for r in remaining if r is not c]
            if not branch(sup, dem, fixed, remaining, tag):
                return False
            sup = dict(sup)
            dem = dict(dem)
            sup[c.line1] -= 1
            dem[c.line2] -= 1
            fixed = fixed + [c]
            remaining = [r for r in remaining if r.line1 != c.line1 or sup[c.line1] > 0]
            remaining = [r for r in remaining if r.line2 != c.line2 or dem[c.line2] > 0]
        return True

    for cls in _classes(cands):
        arcs = [c for c in cls if c.admissible]
        if not branch(dict(inst.first.counts), dict(inst.second.counts), [], arcs, cls[0].tag):
            break
    return Enumeration(out, truncated)


# -- multi-slice driver -----------------------------------------------------------


def split_slices(first: XRayData, second: XRayData) -> list[tuple[QTau, XRayData, XRayData]]:
    def by_height(d: XRayData):
        out: dict[QTau, dict] = {}
        for ln, c in d.counts.items():
            out.setdefault(ln.base.dot(FIVEFOLD_AXIS), {})[ln] = c
        return out

    h1, h2 = by_height(first), by_height(second)
    heights = sorted(set(h1) | set(h2), key=lambda h: (to_float(h), h.a, h.b))
    return [
        (h, XRayData(first.direction, h1.get(h, {})), XRayData(second.direction, h2.get(h, {})))
        for h in heights
    ]


def solve_slices(first: XRayData, second: XRayData, window: Window, translate: Point3) -> Result:
    """Fixed-translate reconstruction of a multi-slice instance.

    Slices are independent except that all points have to share one coset
    of L; the first coset (canonical order of representatives) that is
    feasible on every slice is used.
    """
    parts = split_slices(first, second)
    per_slice: list[list[Solution]] = []
    for h, d1, d2 in parts:
        inst = ReconstructionInstance(d1, d2, window, translate)
        if d1.total != d2.total:
            return Infeasible(f"marginal sums differ on slice {h}")
        cands = candidates(inst)
        sols = []
        for cls in _classes(cands):
            used = _feasible_flow(dict(d1.counts), dict(d2.counts), [c for c in cls if c.admissible])
            if used is not None:
                sols.append(Solution(sorted((c.point for c in used), key=Point3.sort_key), cls[0].tag, translate))
        if not sols:
            return Infeasible(f"slice {h} is infeasible")
        per_slice.append(sols)
    if not per_slice:
        return Solution([], -1, translate)
    for base in per_slice[0]:
        ref = base.points[0]
        chosen = [base]
        for sols in per_slice[1:]:
            match = next((s for s in sols if in_module(s.points[0] - ref)), None)
            if match is None:
                break
            chosen.append(match)
        else:
            pts = sorted((p for s in chosen for p in s.points), key=Point3.sort_key)
            return Solution(pts, base.coset, translate)
    return Infeasible("no common coset across slices")


# -- translate search in the slice's star plane -----------------------------------


def _cross(a, b) -> QTau:
    return a[0] * b[1] - a[1] * b[0]


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _scale(a, k):
    return (a[0] * k, a[1] * k)


def _half_plane_index(v) -> int:
    s1, s0 = v[1].sign(), v[0].sign()
    return 0 if (s1 > 0 or (s1 == 0 and s0 > 0)) else 1


def _angular_sort(vectors):
    import functools

    def cmp(a, b):
        ha, hb = _half_plane_index(a), _half_plane_index(b)
        if ha != hb:
            return ha - hb
        return -_cross(a, b).sign()

    return sorted(vectors, key=functools.cmp_to_key(cmp))


class _Polygon:
    """The open polygon ``{sigma : q - sigma in int W2}`` in projected coordinates."""

    __slots__ = ("cand", "q", "verts", "consts", "lo", "hi")

    def __init__(self, cand: Candidate, q, w_verts, edges):
        self.cand = cand
        self.q = q
        self.verts = [_sub(q, w) for w in w_verts]
        # inside iff consts[k] - cross(e_k, sigma) > 0
        self.consts = [_cross(e, _sub(q, w)) for e, w in zip(edges, w_verts)]
        fl = [(to_float(a), to_float(b)) for a, b in self.verts]
        self.lo = (min(p[0] for p in fl), min(p[1] for p in fl))
        self.hi = (max(p[0] for p in fl), max(p[1] for p in fl))


@dataclass
class SearchResult:
    translate: Point3
    solution: Solution
    cells_examined: int


def _window_polygon(inst: ReconstructionInstance, normal_shift: Optional[QTau], height_star: QTau) -> Window:
    w = inst.window
    if w.dimension == 2:
        return w
    if normal_shift is None:
        raise ReconstructionError("a 3d window needs the normal component of the translate")
    cs = w.cross_section(FIVEFOLD_AXIS_STAR, height_star - normal_shift)
    if cs is None:
        raise ReconstructionError("the search plane misses the window interior")
    return cs


def solve_search_2d(
    inst: ReconstructionInstance,
    normal_shift: Optional[QTau] = None,
) -> Union[SearchResult, Infeasible]:
    """Search the in-plane window translate for a feasible reconstruction.

    ``normal_shift`` is the fixed component ``s . (tau', 0, 1)`` of the
    translate when ``inst.window`` is 3D; a 2D window polygon is used as is
    (its plane offset then fixes that component).  Every cell of the
    arrangement of polygons ``q* - W2`` (q over candidates) is represented by
    some arrangement vertex together with a sector around it; since
    feasibility is monotone in the admissible set, only locally maximal
    sectors are solved.
    """
    if inst.first.total != inst.second.total:
        return Infeasible("marginal sums differ")
    heights = inst.heights()
    if len(heights) > 1:
        raise ReconstructionError("translate search works on a single slice")
    if not heights:
        return SearchResult(inst.translate or Point3(0, 0, 0), Solution([], -1, None), 0)
    h = heights.pop()
    h_star = h.galois()
    w2 = _window_polygon(inst, normal_shift, h_star)
    normal, c_w = w2.plane
    if not normal.cross(FIVEFOLD_AXIS_STAR).is_zero:
        raise ReconstructionError("window polygon must lie in a plane orthogonal to (tau', 0, 1)")
    drop = drop_axis(normal)
    wv = [project2(v, drop) for v in w2.vertices]
    order = convex_hull_2d_coords(wv)
    if len(order) < 3:
        raise ReconstructionError("degenerate window polygon")
    wv = [wv[i] for i in order]
    k = len(wv)
    edges = [_sub(wv[(i + 1) % k], wv[i]) for i in range(k)]

    # sector directions around any arrangement vertex
    rays = []
    for e in edges:
        for r in (e, _scale(e, -1)):
            if not any(_cross(r, x).is_zero and (r[0] * x[0] + r[1] * x[1]).sign() > 0 for x in rays):
                rays.append(r)
    rays = _angular_sort(rays)
    sectors = [_add(rays[i], rays[(i + 1) % len(rays)]) for i in range(len(rays))]
    enter = [[(-_cross(e, d)).sign() for d in sectors] for e in edges]

    cands = candidates(inst)
    total = inst.first.total
    examined = 0
    best: Optional[SearchResult] = None
    workers = worker_count()
    supply, demand = dict(inst.first.counts), dict(inst.second.counts)
    for cls in _classes(cands):
        if len(cls) < total:
            continue
        polys = [_Polygon(c, project2(c.point.star(), drop), wv, edges) for c in cls]
        sets = _maximal_sector_sets(polys, edges, sectors, enter)
        batch = 1 if workers <= 1 else 4 * workers
        for start in range(0, len(sets), batch):
            chunk = sets[start:start + batch]
            jobs = [(supply, demand, [polys[i].cand for i in members]) for members, _, _ in chunk]
            for (members, vertex, sector), used in zip(chunk, ordered_map(_flow_job, jobs, workers)):
                examined += 1
                if used is None:
                    continue
                chosen = [members[j] for j in used]
                sigma2 = _interior_sample(polys, chosen, vertex, sectors[sector], edges)
                sigma = _lift(sigma2, drop, normal, h_star - c_w)
                pts = sorted((polys[i].cand.point for i in chosen), key=Point3.sort_key)
                sol = Solution(pts, cls[0].tag, sigma)
                full = w2.shifted(sigma)
                if any(classify(full, p.star()) is not Location.INTERIOR for p in pts):
                    raise ReconstructionError("translate representative left the cell")
                failed = verify_solution(ReconstructionInstance(inst.first, inst.second, w2, sigma), pts)
                if failed:
                    raise ReconstructionError(f"solution failed verification: {', '.join(failed)}")
                best = SearchResult(sigma, sol, examined)
                break
            if best is not None:
                break
        if best is not None:
            break
    if best is None:
        return Infeasible("no cell of the translate arrangement admits a feasible flow")
    return best


def _lift(p2, drop: int, normal: Point3, offset: QTau) -> Point3:
    """Point of the plane ``normal . x = offset`` with projected coordinates ``p2``."""
    a, b = p2
    n = (normal.x, normal.y, normal.z)
    if drop == 0:
        y, z = a, b
        x = (offset - n[1] * y - n[2] * z) / n[0]
    elif drop == 1:
        z, x = a, b
        y = (offset - n[0] * x - n[2] * z) / n[1]
    else:
        x, y = a, b
        z = (offset - n[0] * x - n[1] * y) / n[2]
    return Point3(x, y, z)


def _segment_crossings(P: _Polygon, Q: _Polygon):
    k = len(P.verts)
    out = []
    for i in range(k):
        a, b = P.verts[i], P.verts[(i + 1) % k]
        ab = _sub(b, a)
        for j in range(k):
            c, d = Q.verts[j], Q.verts[(j + 1) % k]
            cd = _sub(d, c)
            den = _cross(ab, cd)
            if den.is_zero:
                continue
            ac = _sub(c, a)
            t = _cross(ac, cd) / den
            if t.sign() < 0 or (t - 1).sign() > 0:
                continue
            s = _cross(ac, ab) / den
            if s.sign() < 0 or (s - 1).sign() > 0:
                continue
            out.append(_add(a, _scale(ab, t)))
    return out


def _maximal_sector_sets(polys: list[_Polygon], edges, sectors, enter):
    """Distinct admissible sets of locally maximal sectors, largest first."""
    n = len(polys)
    margin = 1e-6
    vertices: dict = {}
    for i, P in enumerate(polys):
        for v in P.verts:
            vertices.setdefault(v, None)
    for i in range(n):
        P = polys[i]
        for j in range(i + 1, n):
            Q = polys[j]
            if P.hi[0] + margin < Q.lo[0] or Q.hi[0] + margin < P.lo[0]:
                continue
            if P.hi[1] + margin < Q.lo[1] or Q.hi[1] + margin < P.lo[1]:
                continue
            for v in _segment_crossings(P, Q):
                vertices.setdefault(v, None)
    found: dict[frozenset, tuple] = {}
    nsec = len(sectors)
    for v in sorted(vertices, key=lambda p: (p[0], p[1])):
        vf = (to_float(v[0]), to_float(v[1]))
        masks = [[] for _ in range(nsec)]
        for idx, P in enumerate(polys):
            # bounding boxes only prune polygons that cannot contain v
            if vf[0] < P.lo[0] - margin or vf[0] > P.hi[0] + margin or vf[1] < P.lo[1] - margin or vf[1] > P.hi[1] + margin:
                continue
            ok = [True] * nsec
            for kk, const in enumerate(P.consts):
                val = (const - _cross(edges[kk], v)).sign()
                if val > 0:
                    continue
                if val < 0:
                    ok = None
                    break
                row = enter[kk]
                for s in range(nsec):
                    if row[s] <= 0:
                        ok[s] = False
            if ok is None:
                continue
            for s in range(nsec):
                if ok[s]:
                    masks[s].append(idx)
        sets = [frozenset(m) for m in masks]
        for s, m in enumerate(sets):
            if not m or any(m < o for o in sets):
                continue
            if m not in found:
                found[m] = (v, s)
    keys = sorted(found, key=lambda m: (-len(m), sorted(m)))
    kept: list[frozenset] = []
    for m in keys:
        if any(m <= o for o in kept):
            continue
        kept.append(m)
    return [(sorted(m), found[m][0], found[m][1]) for m in kept]


def _interior_sample(polys, chosen, vertex, d, edges):
    """Exact point ``vertex + eps d`` inside every chosen polygon."""
    eps = None
    for i in chosen:
        P = polys[i]
        for kk, const in enumerate(P.consts):
            g = const - _cross(edges[kk], vertex)
            c = _cross(edges[kk], d)
            if g.sign() > 0 and c.sign() > 0:
                bound = g / c
                if eps is None or bound < eps:
                    eps = bound
    eps = QTau(1) if eps is None else eps / 2
    return _add(vertex, _scale(d, eps))
