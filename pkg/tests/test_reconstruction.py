from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from oracles import brute_force, random_instances, scaled_window
from icotomo.geometry import ORIGIN, FIVEFOLD_AXIS_STAR, Direction, Point3, fivefold_directions, in_module, line_key
from icotomo.qtau import TAU, QTau
from icotomo.reconstruction import (
    Infeasible, ReconstructionError, ReconstructionInstance, Solution, candidates, enumerate_all, solve_fixed,
    solve_search_2d, solve_slices, verify_solution,
)
from icotomo.tomography import XRayData, xray
from icotomo.window import Location, classify, example_shift, window_icosahedron

E = Point3(0, 1, 0)
F = Point3(1, 0, -TAU)
A, B = E.scale(2), F.scale(2)


def test_flow_matches_brute_force(central3):
    pts = central3.physical()
    feasible = 0
    for inst in random_instances(pts, 100):
        want = brute_force(inst)
        res = solve_fixed(inst)
        assert res.feasible == bool(want)
        if res.feasible:
            feasible += 1
            assert frozenset(res.points) in want
        en = enumerate_all(inst, limit=10_000)
        assert not en.truncated
        assert sorted(sorted(map(Point3.sort_key, s.points)) for s in en.solutions) == sorted(
            sorted(map(Point3.sort_key, s)) for s in want
        )
    assert 10 < feasible < 100


def _full_grid_instance(r, c):
    """Rows along A, columns along B on the full grid {i B + j A}."""
    u, v = Direction(A), Direction(B)
    first = XRayData(u, {line_key(B.scale(i), u): k for i, k in enumerate(r)})
    second = XRayData(v, {line_key(A.scale(j), v): k for j, k in enumerate(c)})
    return ReconstructionInstance(first, second, scaled_window(40), ORIGIN)


def gale_ryser(r, c) -> bool:
    if sum(r) != sum(c) or max(r) > len(c) or max(c) > len(r):
        return False
    rs = sorted(r, reverse=True)
    return all(sum(rs[:k]) <= sum(min(x, k) for x in c) for k in range(1, len(rs) + 1))


def test_gale_ryser():
    rng = random.Random(9)
    seen = {True: 0, False: 0}
    for _ in range(60):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        r = [rng.randint(1, n) for _ in range(m)]
        c = [rng.randint(1, m) for _ in range(n)]
        inst = _full_grid_instance(r, c)
        assert all(x.admissible for x in candidates(inst))
        want = gale_ryser(r, c)
        assert solve_fixed(inst).feasible == want
        seen[want] += 1
    assert seen[True] and seen[False]


def test_two_by_two():
    inst = _full_grid_instance([1, 1], [1, 1])
    res = solve_fixed(inst)
    assert isinstance(res, Solution) and len(res.points) == 2
    en = enumerate_all(inst)
    got = {frozenset(s.points) for s in en.solutions}
    assert got == {frozenset({ORIGIN, A + B}), frozenset({A, B})}


def test_unique_and_infeasible_enumeration():
    assert len(enumerate_all(_full_grid_instance([1], [1]))) == 1
    assert len(enumerate_all(_full_grid_instance([2], [1, 1]))) == 1
    assert len(enumerate_all(_full_grid_instance([2, 2], [1, 1]))) == 0


def test_enumeration_truncates():
    en = enumerate_all(_full_grid_instance([2, 2, 2], [2, 2, 2]), limit=3)
    assert en.truncated and len(en) == 3


def test_marginal_sums_differ():
    res = solve_fixed(_full_grid_instance([2, 1], [1, 1]))
    assert isinstance(res, Infeasible) and res.reason == "marginal sums differ"


def test_support_line_without_l_point():
    u, v = Direction(A), Direction(B)
    bad = XRayData(u, {line_key(Point3(0, 0, QTau(1) / 3), u): 1})
    other = XRayData(v, {line_key(ORIGIN, v): 1})
    with pytest.raises(ReconstructionError):
        solve_fixed(ReconstructionInstance(bad, other, window_icosahedron(), ORIGIN))


def test_direction_validation():
    x = xray([ORIGIN], Direction(E))
    with pytest.raises(ReconstructionError):
        ReconstructionInstance(x, xray([ORIGIN], Direction(E.scale(2))), window_icosahedron())
    with pytest.raises(ReconstructionError):
        ReconstructionInstance(x, xray([ORIGIN], Direction(Point3(1, 0, 0))), window_icosahedron())


def _central_instance(central3, translate=None):
    pts = central3.physical()
    d = fivefold_directions()
    return ReconstructionInstance(xray(pts, d[0]), xray(pts, d[1]), window_icosahedron(), translate)


def test_round_trip_central_slice(central3):
    inst = _central_instance(central3, example_shift())
    cands = candidates(inst)
    assert all(c.admissible for c in cands if c.point in set(central3.physical()))
    res = solve_fixed(inst)
    assert isinstance(res, Solution)
    assert verify_solution(inst, res.points) == []
    assert len(enumerate_all(inst)) == 1


def test_candidate_count_float_cross_check(central3):
    inst = _central_instance(central3, example_shift())
    cands = candidates(inst)
    assert len(cands) == 64
    admissible = [c for c in cands if c.admissible]
    assert len(admissible) == 35
    w = inst.fixed_window()
    tau = (1 + 5 ** 0.5) / 2
    for c in cands:
        q = [a - b for a, b in zip(c.point.star().to_float(), w.translate.to_float())]
        worst = max(
            float(f.offset.a) + float(f.offset.b) * tau - sum(x * y for x, y in zip(f.normal.to_float(), q))
            for f in w.faces
        )
        if abs(worst) > 1e-9:
            assert c.admissible == (worst < 0)


def test_far_translate_has_no_candidates(central3):
    inst = _central_instance(central3, Point3(50, 0, 0))
    assert not any(c.admissible for c in candidates(inst))
    assert not solve_fixed(inst).feasible


def test_window_monotonicity(central3):
    pts = central3.physical()
    for inst in random_instances(pts, 30, seed=5):
        small = solve_fixed(inst).feasible
        big = solve_fixed(ReconstructionInstance(inst.first, inst.second, scaled_window(3), inst.translate)).feasible
        assert big or not small


def test_patch_round_trip(patch3):
    pts = patch3.physical()
    d = fivefold_directions()
    x1, x2 = xray(pts, d[0]), xray(pts, d[1])
    res = solve_slices(x1, x2, window_icosahedron(), example_shift())
    assert isinstance(res, Solution)
    assert xray(res.points, d[0]) == x1 and xray(res.points, d[1]) == x2
    assert all(in_module(p - res.points[0]) for p in res.points)


def test_search_recovers_translate(central3):
    inst = _central_instance(central3)
    s = example_shift()
    start = time.perf_counter()
    res = solve_search_2d(inst, s.dot(FIVEFOLD_AXIS_STAR))
    assert time.perf_counter() - start < 60
    assert not isinstance(res, Infeasible)
    assert res.translate.dot(FIVEFOLD_AXIS_STAR) == s.dot(FIVEFOLD_AXIS_STAR)
    w = window_icosahedron().shifted(res.translate)
    assert all(classify(w, p.star()) is Location.INTERIOR for p in res.solution.points)
    assert xray(res.solution.points, inst.first.direction) == inst.first
    assert xray(res.solution.points, inst.second.direction) == inst.second


def _planar_window(k):
    sec = scaled_window(k).cross_section(FIVEFOLD_AXIS_STAR, QTau(0))
    return sec


def test_search_with_huge_window():
    inst = _full_grid_instance([1, 2], [2, 1])
    big = ReconstructionInstance(inst.first, inst.second, _planar_window(40))
    res = solve_search_2d(big)
    assert not isinstance(res, Infeasible)
    assert res.cells_examined == 1
    bad = _full_grid_instance([2, 2], [1, 1])
    assert isinstance(solve_search_2d(ReconstructionInstance(bad.first, bad.second, _planar_window(40))), Infeasible)


def test_search_single_candidate():
    u, v = Direction(A), Direction(B)
    inst = ReconstructionInstance(xray([A], u), xray([A], v), _planar_window(Fraction(1, 100)))
    res = solve_search_2d(inst)
    assert not isinstance(res, Infeasible) and res.solution.points == [A]
    two = ReconstructionInstance(XRayData(u, {line_key(A, u): 2}), xray([A, A + B], v), _planar_window(Fraction(1, 100)))
    assert isinstance(solve_search_2d(two), Infeasible)
